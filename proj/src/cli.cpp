#include "dsi/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dsi/core.hpp"
#include "dsi/corpus.hpp"
#include "dsi/error.hpp"
#include "dsi/pipeline.hpp"
#include "dsi/plotdata.hpp"
#include "dsi/stats.hpp"
#include "dsi/text.hpp"
#include "json.hpp"

namespace dsi::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string config;
  std::string input;
  std::string scores;
  std::string out;
  std::string format = "jsonl";
  bool permissive = false;

  std::string text;
  std::vector<std::string> abbreviations;

  std::string provider = "mock";
  std::string embeddings;
  std::string model;
  std::size_t dim = MockProvider::kDefaultDimension;
  std::string layers = "6,7";
  std::string normalization = "mean";
  std::size_t parallelism = 1;
  std::string checkpoint;
  std::size_t checkpoint_every = 64;
  bool resume = false;
  std::size_t retries = 2;
  std::string report;

  std::size_t min_spaces = kDefaultMinSpaces;
  std::size_t max_spaces = kDefaultMaxSpaces;
  std::optional<std::size_t> min_words;
  std::optional<std::size_t> max_words;
  std::vector<int> exclude_years;
  std::optional<int> filter_cutoff;

  std::size_t per_subject = 1000;
  bool per_year = false;
  std::uint64_t seed = 0;
  std::size_t top_subjects = 0;

  int cutoff_year = kDefaultCitationCutoffYear;
  std::string mapping;
  bool strict_mapping = false;
  std::string group_by = "field";
  bool per_field_refit = false;
  std::string kind;

  std::size_t bench_records = 1000;
  std::size_t bench_sentences = 15;
};

bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::kInvalidArgument || code == ErrorCode::kInvalidRange ||
         code == ErrorCode::kProviderUnavailable;
}

// Appends `--key value` pairs from a key=value file for keys not already
// given on the command line. Keys the chosen subcommand does not take are
// skipped so one file can serve every subcommand; keys no subcommand takes
// are rejected.
std::vector<std::string> expand_config(std::vector<std::string> args, const CLI::App& app) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config file '" + path + "'");
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
  };
  const CLI::App* chosen = nullptr;
  for (const auto& a : args) {
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == a) chosen = sub;
    }
    if (chosen) break;
  }
  auto known_anywhere = [&](const std::string& flag) {
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_option_no_throw(flag)) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) continue;
    if (!known_anywhere(flag)) {
      throw Error(ErrorCode::kInvalidArgument,
                  path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!chosen || !chosen->get_option_no_throw(flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  body(file);
  file.flush();
  if (!file) throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
}

std::string fmt(const char* pattern, double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::vector<CorpusRecord> load_records(const Options& o, std::ostream& err) {
  IngestOptions ingest_options;
  ingest_options.permissive = o.permissive;
  auto result = ingest(o.input, parse_record_format(o.format), ingest_options);
  for (const auto& e : result.errors) err << "warning: skipped row: " << e.message << '\n';
  return std::move(result.records);
}

std::vector<CorpusRecord> apply_mapping(std::vector<CorpusRecord> records, const Options& o,
                                        std::ostream& err) {
  if (o.mapping.empty()) return records;
  MappingReport report;
  auto mapped = map_fields(records, FieldMapping::load(o.mapping), o.strict_mapping, &report);
  for (const auto& [subject, count] : report.unmapped) {
    err << "warning: subject '" << subject << "' is unmapped; excluded " << count << " record(s)\n";
  }
  return mapped;
}

std::vector<ScoredRecord> load_scored(const Options& o, std::ostream& err) {
  if (o.scores.empty()) throw Error(ErrorCode::kInvalidArgument, "--scores is required");
  auto scored = load_scores(o.scores);
  if (o.mapping.empty()) return scored;
  std::vector<CorpusRecord> records;
  records.reserve(scored.size());
  for (const auto& s : scored) records.push_back(s.record);
  const auto mapped = apply_mapping(std::move(records), o, err);
  std::map<std::string, std::string> field_by_id;
  for (const auto& r : mapped) field_by_id.emplace(r.id, *r.field);
  std::vector<ScoredRecord> out;
  for (auto& s : scored) {
    const auto it = field_by_id.find(s.record.id);
    if (it == field_by_id.end()) continue;
    s.record.field = it->second;
    out.push_back(std::move(s));
  }
  return out;
}

DsiConfig dsi_config(const Options& o) {
  DsiConfig c;
  c.layers = parse_layers(o.layers);
  c.normalization = parse_normalization(o.normalization);
  return c;
}

std::unique_ptr<EmbeddingProvider> make_provider(const Options& o) {
  if (o.provider == "mock") return std::make_unique<MockProvider>(o.dim);
  if (o.provider == "precomputed") {
    if (o.embeddings.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--provider precomputed needs --embeddings <path>");
    }
    return std::make_unique<PrecomputedProvider>(PrecomputedProvider::from_file(o.embeddings));
  }
  if (o.provider == "model") return make_model_provider(o.model);
  throw Error(ErrorCode::kInvalidArgument, "unknown provider '" + o.provider + "'");
}

int cmd_segment(const Options& o, std::ostream& out, std::ostream& err) {
  const Segmenter segmenter(SegmenterOptions{o.abbreviations});
  with_output(o.out, out, [&](std::ostream& os) {
    os << "id,index,sentence\n";
    if (!o.text.empty()) {
      const auto s = segmenter.segment(o.text, "text");
      for (std::size_t i = 0; i < s.size(); ++i) os << "text," << i << ',' << csv_escape(s.sentences[i]) << '\n';
      return;
    }
    if (o.input.empty()) throw Error(ErrorCode::kInvalidArgument, "segment needs --input or --text");
    for (const auto& r : load_records(o, err)) {
      const auto s = segmenter.segment(compose_narrative(r.title, r.abstract), r.id);
      for (std::size_t i = 0; i < s.size(); ++i) {
        os << csv_escape(r.id) << ',' << i << ',' << csv_escape(s.sentences[i]) << '\n';
      }
    }
  });
  return kExitOk;
}

int cmd_filter(const Options& o, std::ostream& out, std::ostream& err) {
  auto records = apply_mapping(load_records(o, err), o, err);
  FilterOptions f;
  f.min_spaces = o.min_spaces;
  f.max_spaces = o.max_spaces;
  f.min_words = o.min_words;
  f.max_words = o.max_words;
  f.exclude_years.insert(o.exclude_years.begin(), o.exclude_years.end());
  auto kept = filter_records(records, f);
  if (o.filter_cutoff) kept = citation_window_filter(kept, *o.filter_cutoff);
  with_output(o.out, out, [&](std::ostream& os) { write_records(os, kept, parse_record_format(o.format)); });
  err << "filter: kept " << kept.size() << " of " << records.size() << " records\n";
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
  auto records = apply_mapping(load_records(o, err), o, err);
  if (o.top_subjects > 0) records = top_subjects(records, o.top_subjects);
  SampleOptions s;
  s.per_subject = o.per_subject;
  s.seed = o.seed;
  s.per_year = o.per_year;
  const auto sample = sample_per_subject(records, s);
  with_output(o.out, out, [&](std::ostream& os) { write_records(os, sample, parse_record_format(o.format)); });
  err << "sample: " << sample.size() << " of " << records.size() << " records\n";
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  config.dsi = dsi_config(o);
  config.parallelism = o.parallelism;
  config.checkpoint_every = o.checkpoint_every;
  config.retry_budget = o.retries;
  config.segmenter.extra_abbreviations = o.abbreviations;
  if (!o.checkpoint.empty()) config.checkpoint_path = o.checkpoint;
  if (o.resume && o.checkpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--resume needs --checkpoint <path>");
  }
  const auto provider = make_provider(o);
  const auto records = apply_mapping(load_records(o, err), o, err);
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "'" + o.input + "' holds no records");

  const auto run = o.resume ? resume(records, *provider, config) : run_scoring(records, *provider, config);
  for (const auto& w : run.report.warnings) err << "warning: " << w << '\n';
  with_output(o.out, out, [&](std::ostream& os) { write_scores(os, run.scored); });
  if (!o.report.empty()) {
    with_output(o.report, out, [&](std::ostream& os) { os << to_json(run.report) << '\n'; });
  }
  err << "score: " << run.report.records_scored << " scored, " << run.report.records_skipped
      << " skipped in " << fmt("%.3f", run.report.wall_seconds) << " s\n";
  return kExitOk;
}

std::string group_label(const ScoredRecord& s, const std::string& group_by) {
  if (group_by == "subject") return s.record.primary_subject;
  if (group_by == "field") return field_of(s);
  throw Error(ErrorCode::kInvalidArgument, "--group-by must be field or subject");
}

int cmd_anova(const Options& o, std::ostream& out, std::ostream& err) {
  const auto scored = load_scored(o, err);
  stats::Groups groups;
  for (const auto& s : scored) {
    if (s.dsi) groups[group_label(s, o.group_by)].push_back(s.dsi->value);
  }
  const auto described = stats::describe_groups(groups);
  const auto anova = stats::anova_oneway(groups);
  const auto ranked = stats::rank_by_mean(described);

  out << "One-way ANOVA of DSI by " << o.group_by << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %8s %12s %12s\n", "group", "n", "mean", "std");
  out << line;
  for (const auto& [label, d] : ranked) {
    std::snprintf(line, sizeof line, "%-40s %8zu %12.6g %12s\n", label.c_str(), d.n, d.mean,
                  d.std ? fmt("%.6g", *d.std).c_str() : "-");
    out << line;
  }
  out << "F(" << anova.df_between << ", " << anova.df_within << ") = " << fmt("%.6g", anova.f_stat)
      << ", p = " << fmt("%.6g", anova.p_value) << ", eta^2 = " << fmt("%.6g", anova.eta_squared)
      << '\n';

  if (!o.out.empty()) {
    ordered_json j;
    j["f_stat"] = anova.f_stat;
    j["df_between"] = anova.df_between;
    j["df_within"] = anova.df_within;
    j["p_value"] = anova.p_value;
    j["eta_squared"] = anova.eta_squared;
    j["ss_between"] = anova.ss_between;
    j["ss_within"] = anova.ss_within;
    j["ss_total"] = anova.ss_total;
    j["group_by"] = o.group_by;
    ordered_json g = ordered_json::array();
    for (const auto& [label, d] : ranked) {
      ordered_json e;
      e["group"] = label;
      e["n"] = d.n;
      e["mean"] = d.mean;
      e["std"] = d.std ? ordered_json(*d.std) : ordered_json(nullptr);
      g.push_back(std::move(e));
    }
    j["groups"] = std::move(g);
    with_output(o.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
  return kExitOk;
}

int cmd_ols(const Options& o, std::ostream& out, std::ostream& err) {
  const auto scored = load_scored(o, err);
  std::vector<double> y;
  stats::NumericColumn dsi_col{"DSI", {}};
  stats::CategoricalColumn field_col{"Field", {}};
  for (const auto& s : scored) {
    if (!s.dsi || s.record.publication_year > o.cutoff_year) continue;
    y.push_back(stats::log10_plus_one(s.record.cit5));
    dsi_col.values.push_back(s.dsi->value);
    field_col.labels.push_back(field_of(s));
  }
  const auto fit = stats::ols_fit(y, std::span(&dsi_col, 1), std::span(&field_col, 1));

  out << "OLS: log10(cit5 + 1) ~ DSI + C(Field)\n";
  out << "records: " << fit.n << " (publication_year <= " << o.cutoff_year
      << "), reference field: " << fit.reference_level << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-44s %12s %12s %10s %12s\n", "term", "estimate", "std_err", "t",
                "p");
  out << line;
  for (const auto& c : fit.coefficients) {
    std::snprintf(line, sizeof line, "%-44s %12.6g %12.6g %10.4g %12.4g\n", c.term.c_str(),
                  c.estimate, c.standard_error, c.t_stat, c.p_value);
    out << line;
  }
  out << "R-squared:          " << fmt("%.6f", fit.r_squared) << '\n'
      << "Adj. R-squared:     " << fmt("%.6f", fit.adjusted_r_squared) << '\n'
      << "MSE (RSS/n):        " << fmt("%.6g", fit.mse) << '\n'
      << "Residual variance:  " << fmt("%.6g", fit.residual_variance) << '\n'
      << "F(" << fit.df_model << ", " << fit.df_resid << "):  " << fmt("%.6g", fit.f_stat)
      << ", p = " << fmt("%.4g", fit.f_p_value) << '\n'
      << "Skew:               " << fmt("%.6g", fit.skew) << '\n'
      << "Kurtosis:           " << fmt("%.6g", fit.kurtosis) << '\n'
      << "Jarque-Bera:        " << fmt("%.6g", fit.jarque_bera)
      << ", p = " << fmt("%.4g", fit.jarque_bera_p_value) << '\n';

  if (!o.out.empty()) {
    ordered_json j;
    ordered_json coefs = ordered_json::object();
    for (const auto& c : fit.coefficients) {
      coefs[c.term] = {{"estimate", c.estimate},
                       {"standard_error", c.standard_error},
                       {"t_stat", c.t_stat},
                       {"p_value", c.p_value}};
    }
    j["coefficients"] = std::move(coefs);
    j["mse"] = fit.mse;
    j["residual_variance"] = fit.residual_variance;
    j["r_squared"] = fit.r_squared;
    j["adjusted_r_squared"] = fit.adjusted_r_squared;
    j["jarque_bera"] = fit.jarque_bera;
    j["jarque_bera_p_value"] = fit.jarque_bera_p_value;
    j["skew"] = fit.skew;
    j["kurtosis"] = fit.kurtosis;
    j["f_stat"] = fit.f_stat;
    j["f_p_value"] = fit.f_p_value;
    j["df_model"] = fit.df_model;
    j["df_resid"] = fit.df_resid;
    j["n"] = fit.n;
    j["reference_level"] = fit.reference_level;
    j["cutoff_year"] = o.cutoff_year;
    with_output(o.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
  return kExitOk;
}

int cmd_trend(const Options& o, std::ostream& out, std::ostream& err) {
  const auto scored = load_scored(o, err);
  std::vector<stats::TrendObservation> obs;
  for (const auto& s : scored) {
    if (s.dsi) obs.push_back({group_label(s, o.group_by), s.record.publication_year, s.dsi->value});
  }
  with_output(o.out, out, [&](std::ostream& os) {
    os << "group,year,n,mean,ci95_low,ci95_high,degenerate\n";
    for (const auto& p : stats::trend_by_year(obs)) {
      os << csv_escape(p.group) << ',' << p.year << ',' << p.n << ',' << format_double(p.mean) << ','
         << format_double(p.ci95_low) << ',' << format_double(p.ci95_high) << ','
         << (p.degenerate ? 1 : 0) << '\n';
    }
  });
  return kExitOk;
}

int cmd_plotdata(const Options& o, std::ostream& out, std::ostream& err) {
  const auto kind = parse_plot_kind(o.kind);
  const auto scored = load_scored(o, err);
  PlotOptions p;
  p.cutoff_year = o.cutoff_year;
  p.line_mode = o.per_field_refit ? stats::LineMode::kPerFieldRefit : stats::LineMode::kJoint;
  // Render fully before touching the output file so failures leave no partial file.
  std::ostringstream buffer;
  emit_plotdata(buffer, kind, scored, p);
  with_output(o.out, out, [&](std::ostream& os) { os << buffer.str(); });
  return kExitOk;
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  BenchmarkOptions b;
  b.n_records = o.bench_records;
  b.sentences_per_record = o.bench_sentences;
  b.dimension = o.dim;
  b.parallelism = o.parallelism;
  b.seed = o.seed;
  const auto report = benchmark(b);
  with_output(o.out, out, [&](std::ostream& os) { os << to_json(report) << '\n'; });
  err << "benchmark: " << report.records_scored << " records in " << fmt("%.3f", report.wall_seconds)
      << " s (" << fmt("%.1f", report.throughput) << " records/s)\n";
  return kExitOk;
}

void add_records_input(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "Corpus records file")->required();
  sub->add_option("--format", o.format, "Record file format: jsonl|csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  sub->add_flag("--permissive", o.permissive, "Report malformed rows and continue");
}

void add_mapping(CLI::App* sub, Options& o) {
  sub->add_option("--mapping", o.mapping, "Two-column subject,field CSV");
  sub->add_flag("--strict-mapping", o.strict_mapping, "Fail on subjects missing from --mapping");
}

void add_scores_input(CLI::App* sub, Options& o) {
  sub->add_option("--scores,--input", o.scores, "Scored-record JSONL file")->required();
  add_mapping(sub, o);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Divergent semantic integration scoring and citation analysis", "dsi"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");
  app.add_option("--config", o.config, "Plain-text key=value file; command-line flags win");

  auto* seg = app.add_subcommand("segment", "Split narratives into sentences (CSV: id,index,sentence)");
  seg->add_option("--input", o.input, "Corpus records file");
  seg->add_option("--format", o.format, "Record file format: jsonl|csv")->check(CLI::IsMember({"jsonl", "csv"}));
  seg->add_option("--text", o.text, "Segment this text instead of a file");
  seg->add_option("--abbreviation", o.abbreviations, "Extra protected abbreviation (repeatable)")
      ->default_str("");
  seg->add_option("--out", o.out, "Output path (default: stdout)");

  auto* filt = app.add_subcommand("filter", "Apply the abstract length and year filters");
  add_records_input(filt, o);
  filt->add_option("--out", o.out, "Output path (default: stdout)");
  filt->add_option("--min-spaces", o.min_spaces, "Minimum U+0020 count in the abstract (inclusive)");
  filt->add_option("--max-spaces", o.max_spaces, "Maximum U+0020 count in the abstract (inclusive)");
  filt->add_option("--min-words", o.min_words, "Also require at least this many words (off by default)");
  filt->add_option("--max-words", o.max_words, "Also require at most this many words (off by default)");
  filt->add_option("--exclude-year", o.exclude_years, "Drop records from this year (repeatable)")
      ->default_str("")
      ->delimiter(',');
  filt->add_option("--cutoff-year", o.filter_cutoff, "Also drop records published after this year");
  add_mapping(filt, o);

  auto* samp = app.add_subcommand("sample", "Seeded per-subject sample without replacement");
  add_records_input(samp, o);
  samp->add_option("--out", o.out, "Output path (default: stdout)");
  samp->add_option("--per-subject", o.per_subject, "Records kept per subject")->check(CLI::PositiveNumber);
  samp->add_flag("--per-year", o.per_year, "Stratify each subject's sample evenly across years");
  samp->add_option("--seed", o.seed, "64-bit sampling seed");
  samp->add_option("--top-subjects", o.top_subjects, "Keep only the N largest subjects first");
  add_mapping(samp, o);

  auto* score = app.add_subcommand("score", "Compute DSI for every record");
  add_records_input(score, o);
  score->add_option("--out", o.out, "Scored-record JSONL output (default: stdout)");
  score->add_option("--provider", o.provider, "Embedding provider: mock|precomputed|model")
      ->check(CLI::IsMember({"mock", "precomputed", "model"}));
  score->add_option("--embeddings", o.embeddings, "Precomputed embedding JSONL file");
  score->add_option("--model", o.model, "Serialized encoder for --provider model");
  score->add_option("--dim", o.dim, "Mock embedding dimension")->check(CLI::Range(2, 1 << 20));
  score->add_option("--layers", o.layers, "Comma-separated encoder layers");
  score->add_option("--normalization", o.normalization, "mean (mean of pairs) | paper4n")
      ->check(CLI::IsMember({"mean", "paper4n", "mean-of-pairs", "paper-literal-4n"}));
  score->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  score->add_option("--checkpoint", o.checkpoint, "Append completed records to this file");
  score->add_option("--checkpoint-every", o.checkpoint_every, "Records per checkpoint flush")
      ->check(CLI::PositiveNumber);
  score->add_flag("--resume", o.resume, "Reuse records already in --checkpoint");
  score->add_option("--retries", o.retries, "Embedding retries before a record is skipped");
  score->add_option("--abbreviation", o.abbreviations, "Extra protected abbreviation (repeatable)")
      ->default_str("");
  score->add_option("--report", o.report, "Write the run report JSON here");
  score->add_option("--seed", o.seed, "Accepted for reproducible invocations; scoring is deterministic");
  add_mapping(score, o);

  auto* anova = app.add_subcommand("analyze-anova", "One-way ANOVA of DSI across groups");
  add_scores_input(anova, o);
  anova->add_option("--group-by", o.group_by, "field|subject")->check(CLI::IsMember({"field", "subject"}));
  anova->add_option("--out", o.out, "Machine-readable JSON result");

  auto* ols = app.add_subcommand("analyze-ols", "Fit log10(cit5 + 1) ~ DSI + C(Field)");
  add_scores_input(ols, o);
  ols->add_option("--cutoff-year", o.cutoff_year, "Latest publication year included");
  ols->add_option("--out", o.out, "Machine-readable JSON result");

  auto* trend = app.add_subcommand("trend", "Mean DSI per group and year with 95% intervals");
  add_scores_input(trend, o);
  trend->add_option("--group-by", o.group_by, "field|subject")->check(CLI::IsMember({"field", "subject"}));
  trend->add_option("--out", o.out, "CSV output (default: stdout)");

  auto* plot = app.add_subcommand("plotdata", "Emit plot-ready CSV for the figures");
  add_scores_input(plot, o);
  plot->add_option("--kind", o.kind, "violin|trend|regression|boxplot")
      ->required()
      ->check(CLI::IsMember({"violin", "trend", "regression", "boxplot"}));
  plot->add_option("--cutoff-year", o.cutoff_year, "Latest publication year in regression data");
  plot->add_flag("--per-field-refit", o.per_field_refit, "Regression: fit each field separately");
  plot->add_option("--out", o.out, "CSV output (default: stdout)");

  auto* bench = app.add_subcommand("benchmark", "Time the pipeline on synthetic records");
  bench->add_option("--records", o.bench_records, "Synthetic record count")->check(CLI::PositiveNumber);
  bench->add_option("--sentences", o.bench_sentences, "Sentences per record");
  bench->add_option("--dim", o.dim, "Mock embedding dimension")->check(CLI::Range(2, 1 << 20));
  bench->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--seed", o.seed, "Synthesis seed");
  bench->add_option("--out", o.out, "Report JSON output (default: stdout)");

  try {
    const auto args = expand_config(raw_args, app);
    std::vector<const char*> argv = {"dsi"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      const auto subs = app.get_subcommands();
      out << (subs.empty() ? app.help("", CLI::AppFormatMode::All) : subs.front()->help());
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }

    const std::map<const CLI::App*, int (*)(const Options&, std::ostream&, std::ostream&)> handlers = {
        {seg, cmd_segment},     {filt, cmd_filter},  {samp, cmd_sample},
        {score, cmd_score},     {anova, cmd_anova},  {ols, cmd_ols},
        {trend, cmd_trend},     {plot, cmd_plotdata}, {bench, cmd_benchmark}};
    for (const auto& [sub, handler] : handlers) {
      if (sub->parsed()) return handler(o, out, err);
    }
    err << "error: no subcommand given\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace dsi::cli
