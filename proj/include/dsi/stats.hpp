#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsi::stats {

/// log10(count + 1); throws kNegativeCount for count < 0.
double log10_plus_one(std::int64_t count);

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> std;  // sample (n - 1) standard deviation; absent for n == 1
};

DescriptiveStats describe(std::span<const double> values);

using Groups = std::map<std::string, std::vector<double>, std::less<>>;

std::map<std::string, DescriptiveStats, std::less<>> describe_groups(const Groups& groups);

/// Groups ordered by descending mean, ties by label.
std::vector<std::pair<std::string, DescriptiveStats>> rank_by_mean(
    const std::map<std::string, DescriptiveStats, std::less<>>& described);

struct AnovaResult {
  double f_stat = 0.0;  // +infinity when within-group variance is zero and means differ
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double p_value = 1.0;
  double eta_squared = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ss_total = 0.0;
};

AnovaResult anova_oneway(const Groups& groups);

struct DummyColumns {
  std::string reference_level;
  std::vector<std::string> levels;  // non-reference levels, lexicographic
  std::vector<std::vector<double>> columns;
};

/// Treatment coding against the lexicographically smallest label.
DummyColumns dummy_encode(std::span<const std::string> labels);

struct NumericColumn {
  std::string name;
  std::vector<double> values;
};

struct CategoricalColumn {
  std::string name;
  std::vector<std::string> labels;
};

struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double standard_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

struct OlsResult {
  // Order: "Intercept", numeric predictors, then "C(name)[T.level]" dummies.
  std::vector<Coefficient> coefficients;
  std::size_t n = 0;
  std::size_t df_model = 0;  // predictors excluding the intercept
  std::size_t df_resid = 0;
  double mse = 0.0;                // RSS / n
  double residual_variance = 0.0;  // RSS / (n - p - 1)
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
  double f_stat = 0.0;
  double f_p_value = 1.0;
  // Residual diagnostics; NaN when the residuals have zero variance.
  double skew = 0.0;
  double kurtosis = 0.0;  // Pearson, not excess
  double jarque_bera = 0.0;
  double jarque_bera_p_value = 1.0;
  std::string reference_level;  // of the first categorical predictor
  std::map<std::string, std::string> reference_levels;
  std::vector<double> fitted;
  std::vector<double> residuals;
  std::vector<double> covariance;  // (p+1)^2, row-major, coefficient order

  const Coefficient& coefficient(std::string_view term) const;
  std::size_t index_of(std::string_view term) const;
};

/// Least squares with an intercept, solved by column-pivoted Householder QR.
OlsResult ols_fit(std::span<const double> response, std::span<const NumericColumn> numeric,
                  std::span<const CategoricalColumn> categorical = {});

struct Moments {
  double skew = 0.0;
  double kurtosis = 0.0;
};

/// Population-moment skew m3/m2^1.5 and kurtosis m4/m2^2.
Moments moments(std::span<const double> sample);

double jarque_bera(std::span<const double> sample);

struct TrendObservation {
  std::string group;
  int year = 0;
  double value = 0.0;
};

struct TrendPoint {
  std::string group;
  int year = 0;
  double mean = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::size_t n = 0;
  bool degenerate = false;  // n == 1, interval collapsed onto the mean
};

/// Per (group, year) mean with a t-based 95% interval; sorted by group, year.
std::vector<TrendPoint> trend_by_year(std::span<const TrendObservation> observations);

struct RegressionObservation {
  std::string field;
  double dsi = 0.0;
  double response = 0.0;
};

struct BandPoint {
  double dsi = 0.0;
  double fit = 0.0;
  double low = 0.0;
  double high = 0.0;
};

struct FieldLine {
  std::string field;
  std::size_t n = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double dsi_min = 0.0;
  double dsi_max = 0.0;
  std::vector<BandPoint> band;
};

enum class LineMode {
  kJoint,         // shared slope, field intercepts
  kPerFieldRefit  // independent simple regression per field
};

/// Fitted lines with 95% mean-response bands, sampled at `samples` evenly
/// spaced DSI values over each field's observed range.
std::vector<FieldLine> regression_line_per_field(std::span<const RegressionObservation> data,
                                                 LineMode mode = LineMode::kJoint,
                                                 std::size_t samples = 100);

/// Linear interpolation between order statistics; `sorted` ascending.
double quantile(std::span<const double> sorted, double p);

struct BoxSummary {
  std::size_t n = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  double mean = 0.0;
  double mean_excl_outliers = 0.0;
  std::size_t outliers = 0;

  bool is_outlier(double v) const noexcept { return v < lower_fence || v > upper_fence; }
};

/// Quartiles with 1.5 * IQR fences.
BoxSummary box_summary(std::span<const double> values);

}  // namespace dsi::stats
