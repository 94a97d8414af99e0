#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsi/text.hpp"

namespace dsi {

struct LayerId {
  int value = 0;

  auto operator<=>(const LayerId&) const = default;
};

/// Encoder layers 6 and 7.
std::vector<LayerId> default_layers();

/// Parses "6,7" style lists; rejects empty, nonpositive and duplicate ids.
std::vector<LayerId> parse_layers(std::string_view text);

// Row-major block of `rows` vectors, each of length `dim`.
class VectorBlock {
 public:
  VectorBlock() = default;
  explicit VectorBlock(std::size_t dim) : dim_(dim) {}

  std::size_t rows() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  /// Throws kDimensionMismatch when v.size() != dim().
  void append(std::span<const double> v);

  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const VectorBlock&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct EmbeddingSet {
  std::string source_id;
  std::size_t dimension = 0;
  std::map<LayerId, VectorBlock> layers;

  /// Rows per layer (0 when there are no layers).
  std::size_t sentence_count() const noexcept;

  /// Checks uniform dimension and row count across layers and that every
  /// vector has positive norm. Throws dsi::Error.
  void validate() const;

  bool operator==(const EmbeddingSet&) const = default;
};

/// Deterministic hermetic embedding. FNV-1a of the sentence bytes, mixed
/// with layer * golden gamma, seeds a splitmix64 stream whose draws map
/// to [-1, 1); the result is scaled to unit norm.
std::vector<double> mock_embed(std::string_view sentence, LayerId layer, std::size_t dimension);

/// Component-wise mean of token vectors.
std::vector<double> pool_tokens(std::span<const std::vector<double>> token_vectors);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // Must be callable concurrently after construction.
  virtual EmbeddingSet embed_sentences(const SentenceList& sentences,
                                       std::span<const LayerId> layers) const = 0;
  virtual std::string name() const = 0;
  /// False when vectors are looked up by id and the sentence text is unused.
  virtual bool consumes_text() const { return true; }
};

class MockProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 768;

  explicit MockProvider(std::size_t dimension = kDefaultDimension);

  EmbeddingSet embed_sentences(const SentenceList& sentences,
                               std::span<const LayerId> layers) const override;
  std::string name() const override { return "mock"; }
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
};

// Serves vectors read from a precomputed file, keyed by record id. Stored
// vectors carry their own segmentation, so sentence text is not consulted.
class PrecomputedProvider final : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(std::vector<EmbeddingSet> sets);
  static PrecomputedProvider from_file(const std::filesystem::path& path);

  EmbeddingSet embed_sentences(const SentenceList& sentences,
                               std::span<const LayerId> layers) const override;
  std::string name() const override { return "precomputed"; }
  bool consumes_text() const override { return false; }
  std::size_t size() const noexcept { return sets_.size(); }

 private:
  std::map<std::string, EmbeddingSet, std::less<>> sets_;
};

/// The transformer backend needs an inference runtime this build does not
/// link; always throws ErrorCode::kProviderUnavailable.
std::unique_ptr<EmbeddingProvider> make_model_provider(const std::filesystem::path& model_path);

std::vector<EmbeddingSet> read_precomputed(std::istream& in);
std::vector<EmbeddingSet> load_precomputed(const std::filesystem::path& path);
void write_precomputed(std::ostream& out, std::span<const EmbeddingSet> sets);
void save_precomputed(const std::filesystem::path& path, std::span<const EmbeddingSet> sets);

}  // namespace dsi
