#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dsi/embedding.hpp"

namespace dsi {

enum class Normalization {
  kMeanOfPairs,     // divide by the number of summed distance terms
  kPaperLiteral4n,  // divide by |layers|^2 * n (4n for two layers)
};

std::string_view to_string(Normalization n);
/// Accepts "mean", "mean-of-pairs", "paper4n", "paper-literal-4n".
Normalization parse_normalization(std::string_view text);

struct DsiConfig {
  std::vector<LayerId> layers = default_layers();
  Normalization normalization = Normalization::kMeanOfPairs;
};

struct DsiScore {
  double value = 0.0;
  std::size_t n_sentences = 0;
  std::size_t n_pairs = 0;
  Normalization normalization = Normalization::kMeanOfPairs;

  bool operator==(const DsiScore&) const = default;
};

inline constexpr std::size_t kMinSentences = 3;

/// 1 - cos(u, v). Throws on length mismatch or a zero-norm input.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Sum over i < j of (1 - cos(a_i, b_j)). Rows are normalized once and the
/// cross products are computed tile by tile; terms are accumulated with
/// Neumaier compensation.
double pairwise_distance_sum(const VectorBlock& a, const VectorBlock& b);

/// Mean (or 4n-normalized sum) of cosine distances over every ordered layer
/// pair (k1, k2) and every sentence pair i < j.
DsiScore dsi(const EmbeddingSet& embeddings, const DsiConfig& config = {});

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dsi
