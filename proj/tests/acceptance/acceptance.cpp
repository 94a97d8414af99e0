// Runs each acceptance criterion once and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dsi/cli.hpp"
#include "dsi/core.hpp"
#include "dsi/corpus.hpp"
#include "dsi/distributions.hpp"
#include "dsi/embedding.hpp"
#include "dsi/pipeline.hpp"
#include "dsi/stats.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path workdir() {
  const fs::path d = fs::path(DSI_TEST_TMPDIR) / "acceptance";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dsi::cli::run(args, out, err);
  if (code != 0) std::cerr << "  cli error: " << err.str();
  return code;
}

using Rows = std::vector<std::vector<double>>;

dsi::EmbeddingSet set_of(const Rows& a, const Rows& b) {
  dsi::EmbeddingSet s;
  s.source_id = "x";
  s.dimension = a.front().size();
  dsi::VectorBlock ba(s.dimension), bb(s.dimension);
  for (const auto& r : a) ba.append(r);
  for (const auto& r : b) bb.append(r);
  s.layers.emplace(dsi::LayerId{6}, std::move(ba));
  s.layers.emplace(dsi::LayerId{7}, std::move(bb));
  return s;
}

Rows rows_of(const dsi::VectorBlock& b) {
  Rows out;
  for (std::size_t i = 0; i < b.rows(); ++i) out.emplace_back(b.row(i).begin(), b.row(i).end());
  return out;
}

// Random mock instance: n random sentences through the mock provider.
dsi::EmbeddingSet mock_instance(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  dsi::SentenceList s{"x", {}};
  for (std::size_t i = 0; i < n; ++i) s.sentences.push_back("Sentence " + std::to_string(rng()));
  const dsi::MockProvider provider(d);
  const auto layers = dsi::default_layers();
  return provider.embed_sentences(s, layers);
}

long double naive_dsi(const dsi::EmbeddingSet& set) {
  long double total = 0.0L;
  for (const auto& [k1, a] : set.layers) {
    for (const auto& [k2, b] : set.layers) {
      for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < b.rows(); ++j) {
          long double dot = 0, na = 0, nb = 0;
          for (std::size_t k = 0; k < set.dimension; ++k) {
            const long double x = a.row(i)[k], y = b.row(j)[k];
            dot += x * y;
            na += x * x;
            nb += y * y;
          }
          total += 1.0L - dot / std::sqrt(na * nb);
        }
      }
    }
  }
  const long double n = static_cast<long double>(set.sentence_count());
  const long double l = static_cast<long double>(set.layers.size());
  return total / (l * l * n * (n - 1) / 2);
}

Outcome c1_unit_oracle() {
  const double r = 1 / std::sqrt(2.0);
  const Rows tri = {{1, 0}, {0, 1}, {r, r}};
  const double v = dsi::dsi(set_of(tri, tri)).value;
  const double err = std::fabs(v - 0.5285954792);
  return {err <= 1e-9, "value " + fmt("%.12f", v) + ", |err| " + fmt("%.2e", err) + " (tol 1e-9)"};
}

Outcome c2_kernel_equivalence() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  const int instances = 120;
  for (int t = 0; t < instances; ++t) {
    const std::size_t n = 3 + rng() % 48, d = 2 + rng() % 63;
    const auto set = mock_instance(rng, n, d);
    const double got = dsi::dsi(set).value;
    worst = std::max(worst, std::fabs(got - static_cast<double>(naive_dsi(set))));
  }
  return {worst <= 1e-12, std::to_string(instances) + " instances, max |kernel - naive| " + fmt("%.2e", worst) +
                              " (tol 1e-12)"};
}

Outcome c3_invariances() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  double worst_perm = 0.0, worst_scale = 0.0;
  const int instances = 120;
  for (int t = 0; t < instances; ++t) {
    const std::size_t n = 3 + rng() % 48, d = 2 + rng() % 63;
    const auto set = mock_instance(rng, n, d);
    const double base = dsi::dsi(set).value;
    auto a = rows_of(set.layers.at(dsi::LayerId{6})), b = rows_of(set.layers.at(dsi::LayerId{7}));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Rows pa, pb;
    for (const auto p : perm) {
      pa.push_back(a[p]);
      pb.push_back(b[p]);
    }
    worst_perm = std::max(worst_perm, std::fabs(dsi::dsi(set_of(pa, pb)).value - base));

    for (auto* rows : {&a, &b}) {
      for (auto& r : *rows) {
        const double s = scale(rng);
        for (auto& x : r) x *= s;
      }
    }
    worst_scale = std::max(worst_scale, std::fabs(dsi::dsi(set_of(a, b)).value - base));
  }
  const bool pass = worst_perm < 1e-12 && worst_scale < 1e-12;
  return {pass, std::to_string(instances) + " instances, max change permute " + fmt("%.2e", worst_perm) +
                    ", rescale " + fmt("%.2e", worst_scale) + " (tol 1e-12)"};
}

Outcome c4_normalization_modes() {
  dsi::DsiConfig literal;
  literal.normalization = dsi::Normalization::kPaperLiteral4n;
  std::mt19937_64 rng(4);
  double worst3 = 0.0, worst10 = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto s3 = mock_instance(rng, 3, 2 + rng() % 63);
    worst3 = std::max(worst3, std::fabs(dsi::dsi(s3).value - dsi::dsi(s3, literal).value));
    const auto s10 = mock_instance(rng, 10, 2 + rng() % 63);
    const double expected = dsi::dsi(s10).value * (10 - 1) / 2.0;
    worst10 = std::max(worst10, std::fabs(dsi::dsi(s10, literal).value - expected));
  }
  const bool pass = worst3 <= 1e-12 && worst10 <= 1e-9;
  return {pass, "n=3 max gap " + fmt("%.2e", worst3) + " (tol 1e-12); n=10 max |4n - mean*(n-1)/2| " +
                    fmt("%.2e", worst10) + " (tol 1e-9)"};
}

Outcome c5_statistics_oracles() {
  namespace st = dsi::stats;
  const auto anova = st::anova_oneway({{"a", {1, 2, 3}}, {"b", {4, 5, 6}}});
  const bool anova_ok = anova.df_between == 1 && anova.df_within == 4 && std::fabs(anova.f_stat - 13.5) <= 1e-9 &&
                        std::fabs(anova.eta_squared - 0.7714285) <= 1e-7 &&
                        std::fabs(anova.eta_squared - 13.5 / 17.5) <= 1e-9;

  const std::vector<double> three = {-1, 0, 1};
  const double jb = st::jarque_bera(three);
  const bool jb_ok = std::fabs(jb - 0.28125) <= 1e-12;

  const std::vector<double> y = {1, 2, 2, 3};
  const std::vector<st::NumericColumn> x = {{"x", {1, 2, 3, 4}}};
  const auto ols = st::ols_fit(y, x);
  const double slope = ols.coefficient("x").estimate, icpt = ols.coefficient("Intercept").estimate;
  const bool ols_ok = std::fabs(slope - 0.6) <= 1e-10 && std::fabs(icpt - 0.5) <= 1e-10;

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    st::Groups groups;
    const std::size_t k = 2 + rng() % 8;
    for (std::size_t i = 0; i < k; ++i) {
      auto& v = groups["g" + std::to_string(i)];
      const std::size_t n = 1 + rng() % 40;
      const double mu = g(rng);
      for (std::size_t j = 0; j < n; ++j) v.push_back(mu + g(rng));
    }
    groups["g0"].push_back(g(rng));  // guarantees N > k
    const auto r = st::anova_oneway(groups);
    worst = std::max(worst, std::fabs(r.ss_between + r.ss_within - r.ss_total) / r.ss_total);
  }
  const bool ss_ok = worst <= 1e-9;

  return {anova_ok && jb_ok && ols_ok && ss_ok,
          "F(1,4)=" + fmt("%.10g", anova.f_stat) + " eta2=" + fmt("%.10g", anova.eta_squared) +
              "; JB=" + fmt("%.12g", jb) + "; slope=" + fmt("%.12g", slope) + " intercept=" + fmt("%.12g", icpt) +
              "; SS identity max rel err " + fmt("%.2e", worst) + " over 1000"};
}

// Reference least squares by normal equations with Gauss-Jordan in long double.
std::vector<long double> reference_fit(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const std::size_t p = cols.size();
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c)
      for (std::size_t i = 0; i < y.size(); ++i) a[r][c] += static_cast<long double>(cols[r][i]) * cols[c][i];
    for (std::size_t i = 0; i < y.size(); ++i) a[r][p] += static_cast<long double>(cols[r][i]) * y[i];
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<long double> beta(p);
  for (std::size_t r = 0; r < p; ++r) beta[r] = a[r][p] / a[r][r];
  return beta;
}

Outcome c6_planted_model() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = workdir() / "planted";
  fs::create_directories(dir);

  const std::vector<std::string> fields = {"Agricultural Sciences", "Engineering", "Humanities",
                                           "Medical Sciences", "Natural Sciences", "Social Sciences"};
  const std::vector<double> offsets = {3.0, 3.3, 3.7, 4.1, 4.4, 4.8};
  const double kSlope = 3.0, kNoise = 0.5;

  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, kNoise);
  const dsi::MockProvider provider(32);
  const dsi::PipelineConfig config;

  std::vector<dsi::CorpusRecord> records;
  std::ofstream mapping(dir / "mapping.csv");
  mapping << "subject,field\n";
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const std::string subjects[] = {fields[f] + " I", fields[f] + " II"};
    for (const auto& s : subjects) mapping << '"' << s << "\",\"" << fields[f] << "\"\n";
    for (int k = 0; k < 500 + 10; ++k) {
      dsi::CorpusRecord r;
      r.id = "p" + std::to_string(f) + "-" + std::to_string(k);
      r.title = "Record " + std::to_string(f) + " " + std::to_string(k);
      r.primary_subject = subjects[k % 2];
      // Repeated sentences pull the score down; distinct ones push it up.
      const std::size_t n = 5 + rng() % 8, distinct = 1 + rng() % n;
      std::vector<std::string> pool;
      for (std::size_t i = 0; i < distinct; ++i) pool.push_back("Claim " + std::to_string(rng() % 1000000) + " holds.");
      for (std::size_t i = 0; i < n; ++i) r.abstract += (i ? " " : "") + pool[i % distinct];
      const bool late = k >= 500;  // outside the citation window
      r.publication_year = late ? 2019 + k % 5 : 2009 + static_cast<int>(rng() % 10);
      const auto scored = dsi::score_record(r, provider, config);
      if (!scored.dsi) return {false, "synthetic record " + r.id + " did not score"};
      const double y = late ? 9.0 : kSlope * scored.dsi->value + offsets[f] + noise(rng);
      r.cit5 = std::llround(std::pow(10.0, y) - 1.0);
      r.cit3 = r.cit5 / 2;
      r.cit_total = r.cit5 + r.cit3;
      records.push_back(std::move(r));
    }
  }
  mapping.close();
  const auto input = dir / "records.jsonl", scores = dir / "scores.jsonl", ols_json = dir / "ols.json";
  dsi::save_records(input, records, dsi::RecordFormat::kJsonl);

  if (cli({"score", "--input", input.string(), "--provider", "mock", "--dim", "32", "--parallelism", "2", "--out",
           scores.string()}) != 0)
    return {false, "score subcommand failed"};
  if (cli({"analyze-ols", "--scores", scores.string(), "--mapping", (dir / "mapping.csv").string(), "--cutoff-year",
           "2018", "--out", ols_json.string()}) != 0)
    return {false, "analyze-ols subcommand failed"};
  const auto j = nlohmann::json::parse(slurp(ols_json));
  const auto& coef = j.at("coefficients").at("DSI");
  const double est = coef.at("estimate"), se = coef.at("standard_error"), p = coef.at("p_value");
  const double adj = j.at("adjusted_r_squared");
  const std::size_t n_used = j.at("n");

  // Independent reference fit of the same design from the scored file.
  std::map<std::string, std::string> subject_field;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    subject_field[fields[f] + " I"] = fields[f];
    subject_field[fields[f] + " II"] = fields[f];
  }
  std::vector<double> y;
  std::vector<std::vector<double>> cols(2 + fields.size() - 1);
  for (const auto& s : dsi::load_scores(scores)) {
    if (!s.dsi || s.record.publication_year > 2018) continue;
    y.push_back(std::log10(static_cast<double>(s.record.cit5) + 1.0));
    cols[0].push_back(1.0);
    cols[1].push_back(s.dsi->value);
    const auto& field = subject_field.at(s.record.primary_subject);
    for (std::size_t f = 1; f < fields.size(); ++f) cols[1 + f].push_back(field == fields[f] ? 1.0 : 0.0);
  }
  const auto beta = reference_fit(cols, y);
  long double rss = 0, tss = 0;
  const long double mean = std::accumulate(y.begin(), y.end(), 0.0L) / y.size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    long double fit = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) fit += beta[c] * cols[c][i];
    rss += (y[i] - fit) * (y[i] - fit);
    tss += (y[i] - mean) * (y[i] - mean);
  }
  const double k = static_cast<double>(cols.size() - 1), nn = static_cast<double>(y.size());
  const double ref_adj = static_cast<double>(1 - (rss / tss) * (nn - 1) / (nn - k - 1));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const bool pass = n_used == 3000 && est > 0 && p < 0.01 && std::fabs(est - kSlope) <= 3 * se &&
                    std::fabs(adj - ref_adj) <= 0.05 && seconds < 60.0;
  return {pass, "n=" + std::to_string(n_used) + " DSI coef " + fmt("%.4f", est) + " (SE " + fmt("%.4f", se) +
                    ", p " + fmt("%.3g", p) + ", " + fmt("%.2f", std::fabs(est - kSlope) / se) +
                    " SE from 3.0); adj R2 " + fmt("%.5f", adj) + " vs reference " + fmt("%.5f", ref_adj) +
                    "; " + fmt("%.2f", seconds) + " s"};
}

Outcome c7_determinism() {
  const fs::path dir = workdir() / "determinism";
  fs::create_directories(dir);
  auto records = dsi::synthesize_records(400, 8, 7);
  const char* subjects[] = {"Acoustics", "Botany", "Chemistry", "Demography"};
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].primary_subject = subjects[i % 4];
    records[i].publication_year = 2005 + static_cast<int>(i % 20);
  }
  const auto input = dir / "records.jsonl";
  dsi::save_records(input, records, dsi::RecordFormat::kJsonl);

  auto pipeline = [&](const std::string& tag, const std::string& parallelism) -> std::string {
    const auto filtered = dir / (tag + "_filtered.jsonl"), sampled = dir / (tag + "_sampled.jsonl"),
               scored = dir / (tag + "_scores.jsonl");
    if (cli({"filter", "--input", input.string(), "--min-spaces", "0", "--max-spaces", "100000", "--exclude-year",
             "2024", "--out", filtered.string()}) != 0 ||
        cli({"sample", "--input", filtered.string(), "--per-subject", "60", "--seed", "42", "--out",
             sampled.string()}) != 0 ||
        cli({"score", "--input", sampled.string(), "--seed", "42", "--parallelism", parallelism, "--dim", "64",
             "--out", scored.string()}) != 0)
      return "";
    return slurp(scored);
  };
  const auto a = pipeline("p8a", "8"), b = pipeline("p8b", "8"), c = pipeline("p1", "1");
  const bool pass = !a.empty() && a == b && a == c;
  return {pass, "parallelism 8 twice and 1: " + std::string(pass ? "byte-identical" : "outputs differ") + " (" +
                    std::to_string(a.size()) + " bytes)"};
}

Outcome c8_filter_fidelity() {
  const fs::path dir = workdir() / "filters";
  fs::create_directories(dir);
  auto words = [](int spaces) {
    std::string s = "Begin";
    for (int i = 0; i < spaces; ++i) s += " w";
    return s;
  };
  struct Case {
    std::string id;
    int spaces;
    int year;
    bool keep;
  };
  const std::vector<Case> cases = {{"s199", 199, 2010, true},  {"s299", 299, 2010, true},
                                   {"s198", 198, 2010, false}, {"s300", 300, 2010, false},
                                   {"y2024a", 250, 2024, false}, {"y2024b", 199, 2024, false},
                                   {"y2018", 250, 2018, true}, {"y2019", 250, 2019, false}};
  std::vector<dsi::CorpusRecord> records;
  for (const auto& c : cases) {
    dsi::CorpusRecord r;
    r.id = c.id;
    r.title = "Title";
    r.abstract = words(c.spaces);
    r.primary_subject = "S";
    r.publication_year = c.year;
    records.push_back(r);
  }
  const auto input = dir / "records.csv", out = dir / "kept.csv";
  dsi::save_records(input, records, dsi::RecordFormat::kCsv);
  if (cli({"filter", "--input", input.string(), "--format", "csv", "--exclude-year", "2024", "--cutoff-year", "2018",
           "--out", out.string()}) != 0)
    return {false, "filter subcommand failed"};
  std::vector<std::string> kept;
  for (const auto& r : dsi::ingest(out, dsi::RecordFormat::kCsv).records) kept.push_back(r.id);
  std::vector<std::string> expected;
  for (const auto& c : cases)
    if (c.keep) expected.push_back(c.id);
  std::string list;
  for (const auto& k : kept) list += (list.empty() ? "" : ",") + k;
  return {kept == expected, "kept {" + list + "}"};
}

Outcome c9_performance() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto report = dsi::benchmark({.n_records = 1000, .sentences_per_record = 15, .dimension = 768,
                                      .parallelism = std::min<std::size_t>(hw, 4)});
  const double per_record = report.wall_seconds / 1000.0;
  const double baseline_seconds = 18.2 * 60.0;  // earlier per-record runtime this is measured against
  const double speedup = baseline_seconds / per_record;

  auto dsi_stage = [](std::size_t sentences) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto r = dsi::benchmark({.n_records = 60, .sentences_per_record = sentences, .dimension = 768,
                                     .parallelism = 1, .seed = 9});
      best = std::min(best, r.stages.dsi_seconds);
    }
    return best;
  };
  const double t50 = dsi_stage(50), t100 = dsi_stage(100);
  const double ratio = t100 / t50;
  const bool pass = report.wall_seconds < 10.0 && speedup > 1e4 && ratio >= 3.0 && ratio <= 5.5;
  return {pass, "1000x15 @ d=768: " + fmt("%.3f", report.wall_seconds) + " s wall (" + std::to_string(hw) +
                    " hw threads), " + fmt("%.3g", speedup) + "x per record; dsi-stage 100/50 ratio " +
                    fmt("%.2f", ratio)};
}

Outcome c10_distribution_engine() {
  struct F {
    double alpha, d1, d2, v;
  };
  struct T {
    double p, df, v;
  };
  const F fs[] = {{0.05, 1, 4, 7.7086},  {0.05, 2, 10, 4.1028}, {0.05, 3, 20, 3.0984}, {0.05, 5, 30, 2.5336},
                  {0.01, 1, 10, 10.0443}, {0.01, 4, 15, 4.8932}, {0.01, 5, 60, 3.3389}, {0.05, 10, 10, 2.9782},
                  {0.01, 2, 5, 13.2739}, {0.05, 1, 120, 3.9201}};
  const T ts[] = {{0.975, 1, 12.7062}, {0.975, 2, 4.3027}, {0.975, 5, 2.5706}, {0.975, 10, 2.2281},
                  {0.975, 30, 2.0423}, {0.95, 4, 2.1318},  {0.95, 20, 1.7247}, {0.995, 3, 5.8409},
                  {0.995, 12, 3.0545}, {0.99, 60, 2.3901}};
  double worst = 0.0;
  int ok = 0;
  for (const auto& c : fs) {
    const double e = std::fabs(dsi::dist::f_critical(c.alpha, c.d1, c.d2) - c.v);
    worst = std::max(worst, e);
    ok += e <= 1e-4;
  }
  for (const auto& c : ts) {
    const double e = std::fabs(dsi::dist::t_quantile(c.p, c.df) - c.v);
    worst = std::max(worst, e);
    ok += e <= 1e-4;
  }
  return {ok == 20, std::to_string(ok) + "/20 within 1e-4, max |err| " + fmt("%.2e", worst)};
}

void soft_speedup_note() {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw < 4) {
    std::cout << "INFO  parallel speedup (soft, not a criterion): skipped, host reports " << hw
              << " hardware thread(s), needs >= 4\n";
    return;
  }
  const auto one = dsi::benchmark({.n_records = 1000, .sentences_per_record = 15, .dimension = 768, .parallelism = 1});
  const auto four = dsi::benchmark({.n_records = 1000, .sentences_per_record = 15, .dimension = 768, .parallelism = 4});
  std::cout << "INFO  parallel speedup (soft, not a criterion): " << fmt("%.3f", one.wall_seconds) << " s at 1 vs "
            << fmt("%.3f", four.wall_seconds) << " s at 4"
            << (four.wall_seconds < one.wall_seconds ? "" : " (no speedup observed)") << '\n';
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 DSI unit oracle", c1_unit_oracle},
      {"2 kernel equivalence", c2_kernel_equivalence},
      {"3 DSI invariances", c3_invariances},
      {"4 normalization modes", c4_normalization_modes},
      {"5 statistics oracles", c5_statistics_oracles},
      {"6 planted-model end-to-end", c6_planted_model},
      {"7 determinism", c7_determinism},
      {"8 filter fidelity", c8_filter_fidelity},
      {"9 performance", c9_performance},
      {"10 F/t distribution engine", c10_distribution_engine},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << '\n' << std::flush;
  }
  soft_speedup_note();
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed\n";
  return failed == 0 ? 0 : 1;
}
