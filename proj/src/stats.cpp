#include "dsi/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <set>

#include "dsi/core.hpp"
#include "dsi/distributions.hpp"
#include "dsi/error.hpp"

namespace dsi::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
  CompensatedSum s;
  for (const double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double center) {
  CompensatedSum s;
  for (const double x : v) s.add((x - center) * (x - center));
  return s.value();
}

std::pair<double, double> t_p(double estimate, double se, double df) {
  if (se > 0.0) {
    const double t = estimate / se;
    return {t, dist::t_two_sided_p(t, df)};
  }
  if (estimate == 0.0) return {0.0, 1.0};
  return {estimate > 0.0 ? kInf : -kInf, 0.0};
}

}  // namespace

double log10_plus_one(std::int64_t count) {
  if (count < 0) {
    throw Error(ErrorCode::kNegativeCount, "citation count " + std::to_string(count) + " is negative");
  }
  return std::log10(static_cast<double>(count) + 1.0);
}

DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyGroup, "no values to describe");
  DescriptiveStats d;
  d.n = values.size();
  d.mean = mean_of(values);
  if (d.n >= 2) d.std = std::sqrt(sum_sq_dev(values, d.mean) / static_cast<double>(d.n - 1));
  return d;
}

std::map<std::string, DescriptiveStats, std::less<>> describe_groups(const Groups& groups) {
  std::map<std::string, DescriptiveStats, std::less<>> out;
  for (const auto& [label, values] : groups) {
    if (values.empty()) throw Error(ErrorCode::kEmptyGroup, "group '" + label + "' is empty");
    out.emplace(label, describe(values));
  }
  return out;
}

std::vector<std::pair<std::string, DescriptiveStats>> rank_by_mean(
    const std::map<std::string, DescriptiveStats, std::less<>>& described) {
  std::vector<std::pair<std::string, DescriptiveStats>> out(described.begin(), described.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second.mean > b.second.mean; });
  return out;
}

AnovaResult anova_oneway(const Groups& groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::kTooFewGroups, "ANOVA needs at least 2 groups, got " +
                                              std::to_string(groups.size()));
  }
  std::size_t total_n = 0;
  CompensatedSum grand_sum;
  for (const auto& [label, values] : groups) {
    if (values.empty()) throw Error(ErrorCode::kEmptyGroup, "group '" + label + "' is empty");
    total_n += values.size();
    for (const double x : values) grand_sum.add(x);
  }
  const std::size_t g = groups.size();
  if (total_n <= g) {
    throw Error(ErrorCode::kInsufficientObservations,
                std::to_string(total_n) + " observations for " + std::to_string(g) + " groups");
  }
  const double grand_mean = grand_sum.value() / static_cast<double>(total_n);

  CompensatedSum between, within, total;
  for (const auto& [label, values] : groups) {
    const double m = mean_of(values);
    between.add(static_cast<double>(values.size()) * (m - grand_mean) * (m - grand_mean));
    within.add(sum_sq_dev(values, m));
    total.add(sum_sq_dev(values, grand_mean));
  }

  AnovaResult r;
  r.df_between = g - 1;
  r.df_within = total_n - g;
  r.ss_between = between.value();
  r.ss_within = within.value();
  r.ss_total = total.value();
  if (r.ss_total <= 0.0) {
    // Every observation identical: no between or within variation.
    r.f_stat = 0.0;
    r.p_value = 1.0;
    r.eta_squared = 0.0;
    return r;
  }
  r.eta_squared = std::clamp(r.ss_between / r.ss_total, 0.0, 1.0);
  if (r.ss_within <= 0.0) {
    r.f_stat = kInf;
    r.p_value = 0.0;
    r.eta_squared = 1.0;
    return r;
  }
  r.f_stat = (r.ss_between / static_cast<double>(r.df_between)) /
             (r.ss_within / static_cast<double>(r.df_within));
  r.p_value = dist::f_sf(r.f_stat, static_cast<double>(r.df_between),
                         static_cast<double>(r.df_within));
  return r;
}

DummyColumns dummy_encode(std::span<const std::string> labels) {
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no labels to encode");
  const std::set<std::string> levels(labels.begin(), labels.end());
  DummyColumns out;
  out.reference_level = *levels.begin();
  out.levels.assign(std::next(levels.begin()), levels.end());
  for (const auto& level : out.levels) {
    std::vector<double> col(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) col[i] = labels[i] == level ? 1.0 : 0.0;
    out.columns.push_back(std::move(col));
  }
  return out;
}

const Coefficient& OlsResult::coefficient(std::string_view term) const {
  return coefficients.at(index_of(term));
}

std::size_t OlsResult::index_of(std::string_view term) const {
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i].term == term) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "no coefficient named '" + std::string(term) + "'");
}

OlsResult ols_fit(std::span<const double> response, std::span<const NumericColumn> numeric,
                  std::span<const CategoricalColumn> categorical) {
  const std::size_t n = response.size();
  OlsResult r;
  std::vector<std::string> terms = {"Intercept"};
  std::vector<const std::vector<double>*> columns;
  for (const auto& c : numeric) {
    if (c.values.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "column '" + c.name + "' has " +
                                                     std::to_string(c.values.size()) +
                                                     " rows, response has " + std::to_string(n));
    }
    terms.push_back(c.name);
    columns.push_back(&c.values);
  }
  std::vector<DummyColumns> dummies;
  dummies.reserve(categorical.size());
  for (const auto& c : categorical) {
    if (c.labels.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "column '" + c.name + "' has " +
                                                     std::to_string(c.labels.size()) +
                                                     " rows, response has " + std::to_string(n));
    }
    if (n == 0) break;
    dummies.push_back(dummy_encode(c.labels));
    const auto& d = dummies.back();
    r.reference_levels[c.name] = d.reference_level;
    if (r.reference_level.empty()) r.reference_level = d.reference_level;
    for (std::size_t k = 0; k < d.levels.size(); ++k) {
      terms.push_back("C(" + c.name + ")[T." + d.levels[k] + "]");
      columns.push_back(&d.columns[k]);
    }
  }

  const std::size_t k = terms.size();
  if (n <= k) {
    throw Error(ErrorCode::kInsufficientObservations,
                std::to_string(n) + " observations for " + std::to_string(k) + " parameters");
  }

  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    y(i) = response[i];
    for (std::size_t c = 0; c < columns.size(); ++c) x(i, c + 1) = (*columns[c])[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (static_cast<std::size_t>(qr.rank()) < k) {
    throw Error(ErrorCode::kRankDeficient, "design matrix has rank " + std::to_string(qr.rank()) +
                                               " < " + std::to_string(k) + " columns");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd fitted = x * beta;
  const Eigen::VectorXd resid = y - fitted;

  const Eigen::MatrixXd rfactor =
      qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv = rfactor.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  const Eigen::MatrixXd unscaled =
      qr.colsPermutation() * (rinv * rinv.transpose()) * qr.colsPermutation().transpose();

  r.n = n;
  r.df_model = k - 1;
  r.df_resid = n - k;
  r.fitted.assign(fitted.data(), fitted.data() + n);
  r.residuals.assign(resid.data(), resid.data() + n);

  const double y_mean = mean_of(response);
  const double tss = sum_sq_dev(response, y_mean);
  const double rss = sum_sq_dev(r.residuals, 0.0);
  r.mse = rss / static_cast<double>(n);
  r.residual_variance = rss / static_cast<double>(r.df_resid);
  r.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  r.adjusted_r_squared = 1.0 - (1.0 - r.r_squared) * static_cast<double>(n - 1) /
                                   static_cast<double>(r.df_resid);

  if (r.df_model > 0) {
    const double ess = std::max(tss - rss, 0.0);
    if (rss > 0.0) {
      r.f_stat = (ess / static_cast<double>(r.df_model)) / r.residual_variance;
      r.f_p_value = dist::f_sf(r.f_stat, static_cast<double>(r.df_model),
                               static_cast<double>(r.df_resid));
    } else {
      r.f_stat = ess > 0.0 ? kInf : 0.0;
      r.f_p_value = ess > 0.0 ? 0.0 : 1.0;
    }
  } else {
    r.f_stat = kNaN;
    r.f_p_value = kNaN;
  }

  r.covariance.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      r.covariance[i * k + j] = r.residual_variance * unscaled(static_cast<Eigen::Index>(i),
                                                               static_cast<Eigen::Index>(j));
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    Coefficient c;
    c.term = terms[i];
    c.estimate = beta(static_cast<Eigen::Index>(i));
    c.standard_error = std::sqrt(std::max(r.covariance[i * k + i], 0.0));
    std::tie(c.t_stat, c.p_value) =
        t_p(c.estimate, c.standard_error, static_cast<double>(r.df_resid));
    r.coefficients.push_back(std::move(c));
  }

  const double m2 = rss / static_cast<double>(n);
  if (m2 > 0.0) {
    const auto mom = moments(r.residuals);
    r.skew = mom.skew;
    r.kurtosis = mom.kurtosis;
    r.jarque_bera = static_cast<double>(n) / 6.0 *
                    (r.skew * r.skew + (r.kurtosis - 3.0) * (r.kurtosis - 3.0) / 4.0);
    r.jarque_bera_p_value = dist::chi2_2_sf(r.jarque_bera);
  } else {
    r.skew = r.kurtosis = r.jarque_bera = r.jarque_bera_p_value = kNaN;
  }
  return r;
}

Moments moments(std::span<const double> sample) {
  if (sample.size() < 2) throw Error(ErrorCode::kDegenerateSample, "need at least 2 values");
  const double m = mean_of(sample);
  CompensatedSum s2, s3, s4;
  for (const double x : sample) {
    const double d = x - m;
    s2.add(d * d);
    s3.add(d * d * d);
    s4.add(d * d * d * d);
  }
  const double n = static_cast<double>(sample.size());
  const double m2 = s2.value() / n;
  if (!(m2 > 0.0)) throw Error(ErrorCode::kDegenerateSample, "sample has zero variance");
  const double m3 = s3.value() / n;
  const double m4 = s4.value() / n;
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

double jarque_bera(std::span<const double> sample) {
  const auto m = moments(sample);
  return static_cast<double>(sample.size()) / 6.0 *
         (m.skew * m.skew + (m.kurtosis - 3.0) * (m.kurtosis - 3.0) / 4.0);
}

std::vector<TrendPoint> trend_by_year(std::span<const TrendObservation> observations) {
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (const auto& o : observations) cells[{o.group, o.year}].push_back(o.value);
  std::vector<TrendPoint> out;
  out.reserve(cells.size());
  for (const auto& [key, values] : cells) {
    TrendPoint p;
    p.group = key.first;
    p.year = key.second;
    const auto d = describe(values);
    p.n = d.n;
    p.mean = d.mean;
    if (d.std) {
      const double half = dist::t_quantile(0.975, static_cast<double>(d.n - 1)) * *d.std /
                          std::sqrt(static_cast<double>(d.n));
      p.ci95_low = d.mean - half;
      p.ci95_high = d.mean + half;
    } else {
      p.ci95_low = p.ci95_high = d.mean;
      p.degenerate = true;
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<BandPoint> sample_band(double lo, double hi, std::size_t samples,
                                   const std::function<BandPoint(double)>& at) {
  std::vector<BandPoint> band;
  band.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double frac = samples == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(samples - 1);
    band.push_back(at(lo + (hi - lo) * frac));
  }
  return band;
}

}  // namespace

std::vector<FieldLine> regression_line_per_field(std::span<const RegressionObservation> data,
                                                 LineMode mode, std::size_t samples) {
  std::map<std::string, std::vector<std::size_t>> by_field;
  for (std::size_t i = 0; i < data.size(); ++i) by_field[data[i].field].push_back(i);
  if (by_field.empty()) throw Error(ErrorCode::kInsufficientObservations, "no observations");
  for (const auto& [field, idx] : by_field) {
    if (idx.size() < 3) {
      throw Error(ErrorCode::kInsufficientObservations,
                  "field '" + field + "' has " + std::to_string(idx.size()) + " points, need 3");
    }
  }

  auto make_line = [&](const std::string& field, const std::vector<std::size_t>& idx) {
    FieldLine line;
    line.field = field;
    line.n = idx.size();
    line.dsi_min = line.dsi_max = data[idx.front()].dsi;
    for (const auto i : idx) {
      line.dsi_min = std::min(line.dsi_min, data[i].dsi);
      line.dsi_max = std::max(line.dsi_max, data[i].dsi);
    }
    return line;
  };

  std::vector<FieldLine> out;
  if (mode == LineMode::kJoint) {
    std::vector<double> y(data.size());
    NumericColumn dsi_col{"DSI", std::vector<double>(data.size())};
    CategoricalColumn field_col{"Field", std::vector<std::string>(data.size())};
    for (std::size_t i = 0; i < data.size(); ++i) {
      y[i] = data[i].response;
      dsi_col.values[i] = data[i].dsi;
      field_col.labels[i] = data[i].field;
    }
    const auto fit = ols_fit(y, std::span(&dsi_col, 1), std::span(&field_col, 1));
    const std::size_t k = fit.coefficients.size();
    const double t = dist::t_quantile(0.975, static_cast<double>(fit.df_resid));
    for (const auto& [field, idx] : by_field) {
      FieldLine line = make_line(field, idx);
      std::vector<double> basis(k, 0.0);
      basis[0] = 1.0;
      std::size_t dummy = 0;
      if (field != fit.reference_level) {
        dummy = fit.index_of("C(Field)[T." + field + "]");
        basis[dummy] = 1.0;
      }
      line.slope = fit.coefficient("DSI").estimate;
      line.intercept = fit.coefficients[0].estimate + (dummy ? fit.coefficients[dummy].estimate : 0.0);
      line.band = sample_band(line.dsi_min, line.dsi_max, samples, [&](double v) {
        basis[1] = v;
        double var = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) var += basis[a] * fit.covariance[a * k + b] * basis[b];
        }
        const double y_hat = line.intercept + line.slope * v;
        const double half = t * std::sqrt(std::max(var, 0.0));
        return BandPoint{v, y_hat, y_hat - half, y_hat + half};
      });
      out.push_back(std::move(line));
    }
    return out;
  }

  for (const auto& [field, idx] : by_field) {
    FieldLine line = make_line(field, idx);
    std::vector<double> y;
    NumericColumn dsi_col{"DSI", {}};
    for (const auto i : idx) {
      y.push_back(data[i].response);
      dsi_col.values.push_back(data[i].dsi);
    }
    const auto fit = ols_fit(y, std::span(&dsi_col, 1));
    const double t = dist::t_quantile(0.975, static_cast<double>(fit.df_resid));
    line.intercept = fit.coefficients[0].estimate;
    line.slope = fit.coefficients[1].estimate;
    line.band = sample_band(line.dsi_min, line.dsi_max, samples, [&](double v) {
      const double var = fit.covariance[0] + 2.0 * v * fit.covariance[1] + v * v * fit.covariance[3];
      const double y_hat = line.intercept + line.slope * v;
      const double half = t * std::sqrt(std::max(var, 0.0));
      return BandPoint{v, y_hat, y_hat - half, y_hat + half};
    });
    out.push_back(std::move(line));
  }
  return out;
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "box summary of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxSummary b;
  b.n = sorted.size();
  b.q1 = quantile(sorted, 0.25);
  b.median = quantile(sorted, 0.5);
  b.q3 = quantile(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  b.lower_fence = b.q1 - 1.5 * iqr;
  b.upper_fence = b.q3 + 1.5 * iqr;
  b.mean = mean_of(sorted);
  std::vector<double> kept;
  for (const double v : sorted) {
    if (b.is_outlier(v)) {
      ++b.outliers;
    } else {
      kept.push_back(v);
    }
  }
  b.mean_excl_outliers = kept.empty() ? b.mean : mean_of(kept);
  return b;
}

}  // namespace dsi::stats
