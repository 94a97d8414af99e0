#include "dsi/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dsi/error.hpp"

namespace dsi {

namespace {

constexpr std::size_t kTile = 32;

double dot(const double* a, const double* b, std::size_t d) noexcept {
  // Four independent lanes keep the loop vectorizable without -ffast-math.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= d; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < d; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

std::vector<double> normalized_rows(const VectorBlock& block) {
  const std::size_t d = block.dim();
  std::vector<double> out(block.data());
  for (std::size_t i = 0; i < block.rows(); ++i) {
    double* r = out.data() + i * d;
    const double norm = std::sqrt(dot(r, r, d));
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::kZeroNormVector, "row " + std::to_string(i) + " has zero norm");
    }
    for (std::size_t k = 0; k < d; ++k) r[k] /= norm;
  }
  return out;
}

// Rows of `na` and `nb` are unit vectors, n rows each, dimension d.
double unit_pair_sum(const double* na, const double* nb, std::size_t n, std::size_t d) {
  CompensatedSum sum;
  std::array<double, kTile * kTile> tile{};
  for (std::size_t i0 = 0; i0 < n; i0 += kTile) {
    const std::size_t i1 = std::min(i0 + kTile, n);
    for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
      const std::size_t j1 = std::min(j0 + kTile, n);
      for (std::size_t i = i0; i < i1; ++i) {
        const double* ai = na + i * d;
        for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) {
          tile[(i - i0) * kTile + (j - j0)] = dot(ai, nb + j * d, d);
        }
      }
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) {
          sum.add(1.0 - tile[(i - i0) * kTile + (j - j0)]);
        }
      }
    }
  }
  return sum.value();
}

}  // namespace

std::string_view to_string(Normalization n) {
  return n == Normalization::kMeanOfPairs ? "mean-of-pairs" : "paper-literal-4n";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "mean" || text == "mean-of-pairs") return Normalization::kMeanOfPairs;
  if (text == "paper4n" || text == "paper-literal-4n") return Normalization::kPaperLiteral4n;
  throw Error(ErrorCode::kInvalidArgument, "unknown normalization '" + std::string(text) + "'");
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors of length " + std::to_string(u.size()) +
                                                   " and " + std::to_string(v.size()));
  }
  const double uu = dot(u.data(), u.data(), u.size());
  const double vv = dot(v.data(), v.data(), v.size());
  if (!(uu > 0.0) || !(vv > 0.0)) throw Error(ErrorCode::kZeroNormVector, "cosine of a zero vector");
  return 1.0 - dot(u.data(), v.data(), u.size()) / (std::sqrt(uu) * std::sqrt(vv));
}

double pairwise_distance_sum(const VectorBlock& a, const VectorBlock& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "blocks of dimension " + std::to_string(a.dim()) +
                                                   " and " + std::to_string(b.dim()));
  }
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "blocks hold " + std::to_string(a.rows()) +
                                                   " and " + std::to_string(b.rows()) + " rows");
  }
  const std::size_t n = a.rows();
  const std::size_t d = a.dim();
  const auto na = normalized_rows(a);
  const auto nb = normalized_rows(b);
  return unit_pair_sum(na.data(), nb.data(), n, d);
}

DsiScore dsi(const EmbeddingSet& embeddings, const DsiConfig& config) {
  if (config.layers.empty()) throw Error(ErrorCode::kInvalidArgument, "no layers configured");
  std::vector<const VectorBlock*> blocks;
  for (const auto layer : config.layers) {
    const auto it = embeddings.layers.find(layer);
    if (it == embeddings.layers.end()) {
      throw Error(ErrorCode::kMissingLayer, "'" + embeddings.source_id + "' lacks layer " +
                                                std::to_string(layer.value));
    }
    blocks.push_back(&it->second);
  }
  const std::size_t n = blocks.front()->rows();
  for (const auto* b : blocks) {
    if (b->rows() != n || b->dim() != blocks.front()->dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "'" + embeddings.source_id + "' layers disagree in shape");
    }
  }
  if (n < kMinSentences) {
    throw Error(ErrorCode::kTooFewSentences, "'" + embeddings.source_id + "' has " +
                                                 std::to_string(n) + " sentences, need at least " +
                                                 std::to_string(kMinSentences));
  }

  const std::size_t d = blocks.front()->dim();
  std::vector<std::vector<double>> unit;
  unit.reserve(blocks.size());
  for (const auto* b : blocks) unit.push_back(normalized_rows(*b));

  CompensatedSum total;
  for (const auto& first : unit) {
    for (const auto& second : unit) total.add(unit_pair_sum(first.data(), second.data(), n, d));
  }

  const std::size_t n_layers = blocks.size();
  DsiScore score;
  score.n_sentences = n;
  score.n_pairs = n_layers * n_layers * n * (n - 1) / 2;
  score.normalization = config.normalization;
  const double denominator = config.normalization == Normalization::kMeanOfPairs
                                 ? static_cast<double>(score.n_pairs)
                                 : static_cast<double>(n_layers * n_layers * n);
  score.value = total.value() / denominator;
  return score;
}

}  // namespace dsi
