#include "dsi/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsi/corpus.hpp"
#include "dsi/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dsi::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path dir() {
  const fs::path d = fs::path(DSI_TEST_TMPDIR) / "cli";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// 30 records over three subjects with a subject -> field mapping file.
const fs::path& corpus() {
  static const fs::path path = [] {
    auto records = dsi::synthesize_records(30, 5, 4);
    const char* subjects[] = {"History", "Optics", "Cardiology"};
    for (std::size_t i = 0; i < records.size(); ++i) {
      records[i].primary_subject = subjects[i % 3];
      records[i].publication_year = 2010 + static_cast<int>(i % 12);
      records[i].cit5 = static_cast<std::int64_t>(i * 3);
      records[i].cit_total = records[i].cit5 + 1;
    }
    const auto p = dir() / "records.jsonl";
    dsi::save_records(p, records, dsi::RecordFormat::kJsonl);
    write(dir() / "mapping.csv", "subject,field\nHistory,Humanities\nOptics,Natural Sciences\nCardiology,Medicine\n");
    return p;
  }();
  return path;
}

const fs::path& scores() {
  static const fs::path path = [] {
    const auto p = dir() / "scores.jsonl";
    const auto r = run({"score", "--input", corpus().string(), "--provider", "mock", "--dim", "32", "--out", p.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return p;
  }();
  return path;
}

std::string mapping() { return (dir() / "mapping.csv").string(); }

}  // namespace

TEST(Cli, ScoreHappyPath) {
  const auto text = slurp(scores());
  EXPECT_EQ(count_lines(text), 30u);
  EXPECT_NE(text.find("\"dsi\":"), std::string::npos);
}

TEST(Cli, ScoreMissingInputNamesPath) {
  const auto r = run({"score", "--input", "missing.jsonl"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.jsonl"), std::string::npos);
  EXPECT_EQ(count_lines(r.err), 1u);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({"score", "--input", corpus().string(), "--bogus"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"score", "--input", corpus().string(), "--provider", "oracle"}).code, 1);
  EXPECT_EQ(run({"score", "--input", corpus().string(), "--layers", "6,6"}).code, 1);
  const auto model = run({"score", "--input", corpus().string(), "--provider", "model"});
  EXPECT_EQ(model.code, 1);
  EXPECT_NE(model.err.find("provider-unavailable"), std::string::npos);
}

TEST(Cli, DeterministicAcrossParallelism) {
  const auto a = dir() / "p1.jsonl", b = dir() / "p8.jsonl", c = dir() / "p8b.jsonl";
  for (const auto& [path, par] : {std::pair{a, "1"}, std::pair{b, "8"}, std::pair{c, "8"}}) {
    ASSERT_EQ(run({"score", "--input", corpus().string(), "--dim", "32", "--seed", "42", "--parallelism", par,
                   "--out", path.string()})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(b), slurp(c));
}

TEST(Cli, AnalyzeOlsReportFields) {
  const auto json = dir() / "ols.json";
  const auto r = run({"analyze-ols", "--scores", scores().string(), "--mapping", mapping(), "--cutoff-year", "2018",
                      "--out", json.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* needle : {"Intercept", "DSI", "C(Field)[T.Medicine]", "Adj. R-squared", "MSE", "Jarque-Bera",
                             "Skew", "Kurtosis"}) {
    EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
  }
  const auto j = slurp(json);
  for (const char* key : {"\"adjusted_r_squared\"", "\"mse\"", "\"jarque_bera\"", "\"skew\"", "\"kurtosis\"",
                          "\"reference_level\"", "\"standard_error\""}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
}

TEST(Cli, AnalyzeAnovaAndTrend) {
  const auto r = run({"analyze-anova", "--scores", scores().string(), "--mapping", mapping()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("F(2, 27)"), std::string::npos) << r.out;
  const auto t = run({"trend", "--scores", scores().string(), "--group-by", "subject"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out.substr(0, t.out.find('\n')), "group,year,n,mean,ci95_low,ci95_high,degenerate");
}

TEST(Cli, PlotdataKinds) {
  for (const char* kind : {"violin", "boxplot", "trend", "regression"}) {
    const auto r = run({"plotdata", "--scores", scores().string(), "--mapping", mapping(), "--kind", kind});
    ASSERT_EQ(r.code, 0) << kind << ": " << r.err;
    EXPECT_GT(count_lines(r.out), 3u) << kind;
  }
  const auto reg = run({"plotdata", "--scores", scores().string(), "--mapping", mapping(), "--kind", "regression"});
  // 3 fields x 100 band samples + header.
  EXPECT_EQ(count_lines(reg.out), 301u);
  EXPECT_EQ(run({"plotdata", "--scores", scores().string(), "--kind", "histogram"}).code, 1);
}

TEST(Cli, BoxplotQuartilesFromScores) {
  std::vector<dsi::ScoredRecord> scored;
  const double values[] = {1, 2, 3, 4, 100};
  for (int i = 0; i < 5; ++i) {
    dsi::CorpusRecord r;
    r.id = "b" + std::to_string(i);
    r.primary_subject = "A";
    r.publication_year = 2000;
    scored.push_back({r, dsi::DsiScore{values[i], 3, 12, {}}, {}});
  }
  const auto p = dir() / "box.jsonl";
  dsi::persist_scores(scored, p);
  const auto r = run({"plotdata", "--scores", p.string(), "--kind", "boxplot"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_NE(header.find("q1,median,q3"), std::string::npos) << header;
  int outliers = 0;
  while (std::getline(lines, row)) {
    EXPECT_NE(row.find(",2,3,4,"), std::string::npos) << row;
    if (row.find(",100,") != std::string::npos) {
      EXPECT_NE(row.find(",1,"), std::string::npos);
      ++outliers;
    }
  }
  EXPECT_EQ(outliers, 1);
}

TEST(Cli, RegressionWithoutCitationsNamesColumn) {
  std::istringstream in(slurp(scores()));
  std::ostringstream stripped;
  std::string line;
  while (std::getline(in, line)) {
    const auto at = line.find(",\"cit5\":");
    const auto end = line.find(',', at + 1);
    stripped << line.substr(0, at) << line.substr(end) << '\n';
  }
  const auto p = dir() / "nocit.jsonl";
  write(p, stripped.str());
  const auto r = run({"plotdata", "--scores", p.string(), "--mapping", mapping(), "--kind", "regression"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cit5"), std::string::npos) << r.err;
}

TEST(Cli, FilterAndSample) {
  auto records = dsi::synthesize_records(6, 3, 1);
  const auto words = [](int n) {
    std::string s = "Start";
    for (int i = 1; i < n; ++i) s += " w";
    return s;
  };
  records[0].abstract = words(200);  // 199 spaces
  records[1].abstract = words(300);  // 299
  records[2].abstract = words(199);  // 198
  records[3].abstract = words(301);  // 300
  records[4].abstract = words(250);
  records[4].publication_year = 2024;
  records[5].abstract = words(250);
  records[5].publication_year = 2019;
  const auto in = dir() / "filter.csv";
  dsi::save_records(in, records, dsi::RecordFormat::kCsv);
  const auto r = run({"filter", "--input", in.string(), "--format", "csv", "--exclude-year", "2024",
                      "--exclude-year", "2023", "--cutoff-year", "2018"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream out(r.out);  // output keeps the input format
  const auto kept = dsi::read_records(out, dsi::RecordFormat::kCsv).records;
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, records[0].id);
  EXPECT_EQ(kept[1].id, records[1].id);

  const auto s1 = run({"sample", "--input", corpus().string(), "--per-subject", "4", "--seed", "9"});
  const auto s2 = run({"sample", "--input", corpus().string(), "--per-subject", "4", "--seed", "9"});
  ASSERT_EQ(s1.code, 0) << s1.err;
  EXPECT_EQ(s1.out, s2.out);
  EXPECT_EQ(count_lines(s1.out), 12u);
}

TEST(Cli, ConfigFileFlagsWin) {
  const auto cfg = dir() / "run.cfg";
  write(cfg, "# shared settings\ndim = 16\nper-subject = 3\nnormalization = paper4n\n");
  const auto a = dir() / "cfg16.jsonl", b = dir() / "cfg32.jsonl";
  ASSERT_EQ(run({"--config", cfg.string(), "score", "--input", corpus().string(), "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"--config", cfg.string(), "score", "--input", corpus().string(), "--dim", "32", "--out", b.string()})
                .code,
            0);
  const auto direct = dir() / "direct16.jsonl";
  ASSERT_EQ(run({"score", "--input", corpus().string(), "--dim", "16", "--normalization", "paper4n", "--out",
                 direct.string()})
                .code,
            0);
  EXPECT_EQ(slurp(a), slurp(direct));
  EXPECT_NE(slurp(a), slurp(b));
  EXPECT_NE(slurp(a).find("paper-literal-4n"), std::string::npos);

  write(cfg, "dimm=3\n");
  EXPECT_EQ(run({"--config", cfg.string(), "score", "--input", corpus().string()}).code, 1);
}

TEST(Cli, HelpDocumentsEveryInterfaceFlag) {
  const auto r = run({"--help"});
  ASSERT_EQ(r.code, 0);
  for (const char* flag :
       {"--input", "--out", "--format", "--provider", "--embeddings", "--dim", "--layers", "--normalization",
        "--min-spaces", "--max-spaces", "--exclude-year", "--per-subject", "--per-year", "--seed",
        "--cutoff-year", "--mapping", "--strict-mapping", "--parallelism", "--checkpoint", "--config"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  for (const char* value : {"jsonl", "csv", "mock", "precomputed", "model", "paper4n", "[6,7]", "[199]", "[299]",
                            "[1000]", "[2018]"}) {
    EXPECT_NE(r.out.find(value), std::string::npos) << value;
  }
  for (const char* sub : {"segment", "filter", "sample", "score", "analyze-anova", "analyze-ols", "trend",
                          "plotdata", "benchmark"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  const auto sub = run({"score", "--help"});
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find("--checkpoint"), std::string::npos);
}

TEST(Cli, ResumeThroughCheckpoint) {
  const auto ckpt = dir() / "ckpt.jsonl";
  fs::remove(ckpt);
  const auto full = dir() / "full.jsonl", resumed = dir() / "resumed.jsonl";
  ASSERT_EQ(run({"score", "--input", corpus().string(), "--dim", "32", "--out", full.string()}).code, 0);
  // Simulate an interrupted run: keep only the first 10 checkpoint lines.
  std::istringstream all(slurp(full));
  std::string head, line;
  for (int i = 0; i < 10 && std::getline(all, line); ++i) head += line + "\n";
  write(ckpt, head);
  const auto report = dir() / "report.json";
  const auto r = run({"score", "--input", corpus().string(), "--dim", "32", "--checkpoint", ckpt.string(),
                      "--resume", "--out", resumed.string(), "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(full), slurp(resumed));
  EXPECT_NE(slurp(report).find("\"records_from_checkpoint\": 10"), std::string::npos) << slurp(report);
}

TEST(Cli, SegmentText) {
  const auto r = run({"segment", "--text", "First one. Second e.g. here. Third."});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 4u);  // header + 3 sentences
  EXPECT_NE(r.out.find("\"Second e.g. here.\""), std::string::npos);
}

TEST(Cli, Benchmark) {
  const auto r = run({"benchmark", "--records", "50", "--sentences", "6", "--dim", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"throughput_records_per_second\""), std::string::npos);
}
