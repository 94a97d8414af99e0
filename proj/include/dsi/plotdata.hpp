#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "dsi/corpus.hpp"
#include "dsi/stats.hpp"

namespace dsi {

enum class PlotKind { kViolin, kTrend, kRegression, kBoxplot };
PlotKind parse_plot_kind(std::string_view text);

struct PlotOptions {
  int cutoff_year = kDefaultCitationCutoffYear;  // regression only
  stats::LineMode line_mode = stats::LineMode::kJoint;
  std::size_t band_samples = 100;
};

/// Writes plot-ready CSV with a header row. Skipped records are ignored.
///   violin:     one row per record grouped by field, with box statistics
///   boxplot:    the same, grouped by subject
///   trend:      TrendPoint rows per (field, year)
///   regression: fitted line and 95% band samples per field
void emit_plotdata(std::ostream& out, PlotKind kind, std::span<const ScoredRecord> scores,
                   const PlotOptions& options = {});

/// Shortest decimal that round-trips; "nan"/"inf"/"-inf" otherwise.
std::string format_double(double v);

/// Field label of a record; throws kMissingColumn when absent.
const std::string& field_of(const ScoredRecord& s);

}  // namespace dsi
