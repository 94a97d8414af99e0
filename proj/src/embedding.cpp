#include "dsi/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "dsi/error.hpp"
#include "dsi/random.hpp"
#include "json.hpp"

namespace dsi {

namespace {

double squared_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

}  // namespace

std::vector<LayerId> default_layers() { return {LayerId{6}, LayerId{7}}; }

std::vector<LayerId> parse_layers(std::string_view text) {
  std::vector<LayerId> out;
  std::set<int> seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || value <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid layer id '" + std::string(item) + "'");
    }
    if (!seen.insert(value).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate layer id " + std::to_string(value));
    }
    out.push_back(LayerId{value});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void VectorBlock::append(std::span<const double> v) {
  if (v.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "vector of length " + std::to_string(v.size()) +
                                                   ", expected " + std::to_string(dim_));
  }
  data_.insert(data_.end(), v.begin(), v.end());
}

std::size_t EmbeddingSet::sentence_count() const noexcept {
  return layers.empty() ? 0 : layers.begin()->second.rows();
}

void EmbeddingSet::validate() const {
  if (dimension == 0) throw Error(ErrorCode::kValidation, "'" + source_id + "': dimension is zero");
  const std::size_t n = sentence_count();
  for (const auto& [layer, block] : layers) {
    const std::string where = "'" + source_id + "' layer " + std::to_string(layer.value);
    if (block.dim() != dimension) {
      throw Error(ErrorCode::kDimensionMismatch, where + ": vectors of length " +
                                                     std::to_string(block.dim()) + ", expected " +
                                                     std::to_string(dimension));
    }
    if (block.rows() != n) {
      throw Error(ErrorCode::kDimensionMismatch, where + ": " + std::to_string(block.rows()) +
                                                     " vectors, other layers have " +
                                                     std::to_string(n));
    }
    for (std::size_t i = 0; i < block.rows(); ++i) {
      if (!(squared_norm(block.row(i)) > 0.0)) {
        throw Error(ErrorCode::kZeroNormVector, where + " sentence " + std::to_string(i));
      }
    }
  }
}

std::vector<double> mock_embed(std::string_view sentence, LayerId layer, std::size_t dimension) {
  if (dimension < 2) {
    throw Error(ErrorCode::kInvalidArgument, "mock dimension must be at least 2");
  }
  std::uint64_t seed = fnv1a64(sentence);
  seed ^= static_cast<std::uint64_t>(layer.value) * kGoldenGamma;
  SplitMix64 rng(seed);
  std::vector<double> v(dimension);
  for (auto& x : v) x = 2.0 * rng.unit() - 1.0;
  const double norm = std::sqrt(squared_norm(v));
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kDegenerateVector, "mock vector has zero norm");
  }
  for (auto& x : v) x /= norm;
  return v;
}

std::vector<double> pool_tokens(std::span<const std::vector<double>> token_vectors) {
  if (token_vectors.empty()) throw Error(ErrorCode::kEmptyInput, "no token vectors to pool");
  const std::size_t dim = token_vectors.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& t : token_vectors) {
    if (t.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "token vectors have differing lengths");
    }
    for (std::size_t k = 0; k < dim; ++k) mean[k] += t[k];
  }
  const double count = static_cast<double>(token_vectors.size());
  for (auto& x : mean) x /= count;
  return mean;
}

MockProvider::MockProvider(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 2) throw Error(ErrorCode::kInvalidArgument, "mock dimension must be at least 2");
}

EmbeddingSet MockProvider::embed_sentences(const SentenceList& sentences,
                                           std::span<const LayerId> layers) const {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyInput, "no sentences to embed");
  if (layers.empty()) throw Error(ErrorCode::kInvalidArgument, "no layers requested");
  EmbeddingSet out;
  out.source_id = sentences.source_id;
  out.dimension = dimension_;
  for (const auto layer : layers) {
    VectorBlock block(dimension_);
    for (const auto& s : sentences.sentences) block.append(mock_embed(s, layer, dimension_));
    out.layers.emplace(layer, std::move(block));
  }
  return out;
}

PrecomputedProvider::PrecomputedProvider(std::vector<EmbeddingSet> sets) {
  for (auto& s : sets) {
    s.validate();
    auto id = s.source_id;
    if (!sets_.emplace(id, std::move(s)).second) {
      throw Error(ErrorCode::kDuplicateId, "embedding id '" + id + "' appears twice");
    }
  }
}

PrecomputedProvider PrecomputedProvider::from_file(const std::filesystem::path& path) {
  return PrecomputedProvider(load_precomputed(path));
}

EmbeddingSet PrecomputedProvider::embed_sentences(const SentenceList& sentences,
                                                  std::span<const LayerId> layers) const {
  if (layers.empty()) throw Error(ErrorCode::kInvalidArgument, "no layers requested");
  const auto it = sets_.find(sentences.source_id);
  if (it == sets_.end()) {
    throw Error(ErrorCode::kMissingEmbedding, "no embeddings for id '" + sentences.source_id + "'");
  }
  EmbeddingSet out;
  out.source_id = it->second.source_id;
  out.dimension = it->second.dimension;
  for (const auto layer : layers) {
    const auto found = it->second.layers.find(layer);
    if (found == it->second.layers.end()) {
      throw Error(ErrorCode::kLayerNotSupported, "id '" + sentences.source_id + "' has no layer " +
                                                     std::to_string(layer.value));
    }
    out.layers.emplace(layer, found->second);
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_model_provider(const std::filesystem::path& model_path) {
  throw Error(ErrorCode::kProviderUnavailable,
              "cannot load '" + model_path.string() +
                  "': this build has no transformer inference runtime; use the mock or "
                  "precomputed provider");
}

std::vector<EmbeddingSet> read_precomputed(std::istream& in) {
  using nlohmann::json;
  std::vector<EmbeddingSet> out;
  std::set<std::string, std::less<>> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string at = "line " + std::to_string(line_no);
    EmbeddingSet set;
    try {
      const json j = json::parse(line);
      set.source_id = j.at("id").get<std::string>();
      const auto dim = j.at("dimension").get<long long>();
      if (dim <= 0) throw Error(ErrorCode::kParseError, at + ": dimension must be positive");
      set.dimension = static_cast<std::size_t>(dim);
      for (const auto& [key, rows] : j.at("layers").items()) {
        const auto layer = parse_layers(key);
        if (layer.size() != 1) throw Error(ErrorCode::kParseError, at + ": bad layer key " + key);
        VectorBlock block(set.dimension);
        for (const auto& row : rows) {
          const auto v = row.get<std::vector<double>>();
          if (v.size() != set.dimension) {
            throw Error(ErrorCode::kDimensionMismatch,
                        at + ": layer " + key + " has a vector of length " +
                            std::to_string(v.size()) + ", expected " + std::to_string(dim));
          }
          block.append(v);
        }
        set.layers.emplace(layer.front(), std::move(block));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, at + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDimensionMismatch || e.code() == ErrorCode::kParseError) throw;
      throw Error(ErrorCode::kParseError, at + ": " + e.message());
    }
    try {
      set.validate();
    } catch (const Error& e) {
      throw Error(e.code(), at + ": " + e.message());
    }
    if (!ids.insert(set.source_id).second) {
      throw Error(ErrorCode::kDuplicateId, at + ": id '" + set.source_id + "' already defined");
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<EmbeddingSet> load_precomputed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  try {
    return read_precomputed(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_precomputed(std::ostream& out, std::span<const EmbeddingSet> sets) {
  using nlohmann::ordered_json;
  for (const auto& set : sets) {
    ordered_json j;
    j["id"] = set.source_id;
    j["dimension"] = set.dimension;
    ordered_json layers = ordered_json::object();
    for (const auto& [layer, block] : set.layers) {
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < block.rows(); ++i) {
        const auto r = block.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
      }
      layers[std::to_string(layer.value)] = std::move(rows);
    }
    j["layers"] = std::move(layers);
    out << j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
  }
}

void save_precomputed(const std::filesystem::path& path, std::span<const EmbeddingSet> sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  write_precomputed(out, sets);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
}

}  // namespace dsi
