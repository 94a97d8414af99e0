#include "dsi/plotdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include "dsi/error.hpp"

namespace dsi {

namespace {

struct Member {
  const ScoredRecord* scored;
  double dsi;
};

void emit_distribution(std::ostream& out, std::span<const ScoredRecord> scores, bool by_subject) {
  std::map<std::string, std::vector<Member>> groups;
  for (const auto& s : scores) {
    if (!s.dsi) continue;
    const std::string& key = by_subject ? s.record.primary_subject : field_of(s);
    groups[key].push_back({&s, s.dsi->value});
  }
  if (groups.empty()) throw Error(ErrorCode::kEmptyInput, "no scored records to plot");

  std::vector<std::pair<std::string, stats::BoxSummary>> ordered;
  for (const auto& [group, members] : groups) {
    std::vector<double> values;
    values.reserve(members.size());
    for (const auto& m : members) values.push_back(m.dsi);
    ordered.emplace_back(group, stats::box_summary(values));
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second.mean > b.second.mean; });

  out << "group,field,subject,id,dsi,n,q1,median,q3,lower_fence,upper_fence,outlier,mean,"
         "mean_excl_outliers\n";
  for (const auto& [group, box] : ordered) {
    auto members = groups[group];
    std::sort(members.begin(), members.end(),
              [](const Member& a, const Member& b) { return a.scored->record.id < b.scored->record.id; });
    for (const auto& m : members) {
      const auto& r = m.scored->record;
      out << csv_escape(group) << ',' << csv_escape(r.field.value_or("")) << ','
          << csv_escape(r.primary_subject) << ',' << csv_escape(r.id) << ',' << format_double(m.dsi)
          << ',' << box.n << ',' << format_double(box.q1) << ',' << format_double(box.median) << ','
          << format_double(box.q3) << ',' << format_double(box.lower_fence) << ','
          << format_double(box.upper_fence) << ',' << (box.is_outlier(m.dsi) ? 1 : 0) << ','
          << format_double(box.mean) << ',' << format_double(box.mean_excl_outliers) << '\n';
    }
  }
}

void emit_trend(std::ostream& out, std::span<const ScoredRecord> scores) {
  std::vector<stats::TrendObservation> obs;
  for (const auto& s : scores) {
    if (s.dsi) obs.push_back({field_of(s), s.record.publication_year, s.dsi->value});
  }
  if (obs.empty()) throw Error(ErrorCode::kEmptyInput, "no scored records to plot");
  out << "group,year,n,mean,ci95_low,ci95_high,degenerate\n";
  for (const auto& p : stats::trend_by_year(obs)) {
    out << csv_escape(p.group) << ',' << p.year << ',' << p.n << ',' << format_double(p.mean) << ','
        << format_double(p.ci95_low) << ',' << format_double(p.ci95_high) << ','
        << (p.degenerate ? 1 : 0) << '\n';
  }
}

void emit_regression(std::ostream& out, std::span<const ScoredRecord> scores,
                     const PlotOptions& options) {
  std::vector<stats::RegressionObservation> data;
  for (const auto& s : scores) {
    if (!s.dsi || s.record.publication_year > options.cutoff_year) continue;
    data.push_back({field_of(s), s.dsi->value, stats::log10_plus_one(s.record.cit5)});
  }
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "no scored records within the cutoff");
  out << "field,n,slope,intercept,dsi,fit,ci95_low,ci95_high\n";
  for (const auto& line : stats::regression_line_per_field(data, options.line_mode, options.band_samples)) {
    for (const auto& p : line.band) {
      out << csv_escape(line.field) << ',' << line.n << ',' << format_double(line.slope) << ','
          << format_double(line.intercept) << ',' << format_double(p.dsi) << ','
          << format_double(p.fit) << ',' << format_double(p.low) << ',' << format_double(p.high)
          << '\n';
    }
  }
}

}  // namespace

PlotKind parse_plot_kind(std::string_view text) {
  if (text == "violin") return PlotKind::kViolin;
  if (text == "trend") return PlotKind::kTrend;
  if (text == "regression") return PlotKind::kRegression;
  if (text == "boxplot") return PlotKind::kBoxplot;
  throw Error(ErrorCode::kInvalidArgument, "unknown plot kind '" + std::string(text) + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const std::string& field_of(const ScoredRecord& s) {
  if (!s.record.field) {
    throw Error(ErrorCode::kMissingColumn,
                "record '" + s.record.id + "' has no 'field'; supply a subject,field mapping");
  }
  return *s.record.field;
}

void emit_plotdata(std::ostream& out, PlotKind kind, std::span<const ScoredRecord> scores,
                   const PlotOptions& options) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "scores file is empty");
  switch (kind) {
    case PlotKind::kViolin: return emit_distribution(out, scores, false);
    case PlotKind::kBoxplot: return emit_distribution(out, scores, true);
    case PlotKind::kTrend: return emit_trend(out, scores);
    case PlotKind::kRegression: return emit_regression(out, scores, options);
  }
}

}  // namespace dsi
