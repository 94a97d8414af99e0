#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsi/core.hpp"
#include "dsi/corpus.hpp"
#include "dsi/embedding.hpp"
#include "dsi/text.hpp"

namespace dsi {

struct PipelineConfig {
  std::size_t parallelism = 1;
  std::optional<std::filesystem::path> checkpoint_path;
  std::size_t checkpoint_every = 64;
  // Attempts after the first failed embedding call before the record is
  // marked provider-failure.
  std::size_t retry_budget = 2;
  DsiConfig dsi;
  SegmenterOptions segmenter;
};

struct StageTimings {
  double segment_seconds = 0.0;
  double embed_seconds = 0.0;
  double dsi_seconds = 0.0;
};

struct RunReport {
  std::size_t input_count = 0;
  std::size_t records_scored = 0;
  std::size_t records_skipped = 0;
  std::size_t records_from_checkpoint = 0;
  std::map<std::string, std::size_t> skipped_by_reason;
  double wall_seconds = 0.0;
  double throughput = 0.0;  // records per second
  // Summed over workers.
  StageTimings stages;
  std::vector<std::string> warnings;
};

std::string to_json(const RunReport& report);

struct ScoringRun {
  std::vector<ScoredRecord> scored;  // sorted by record id
  RunReport report;
};

/// Compose, segment, embed and score one record. Stage durations are added
/// to `timings` when given.
ScoredRecord score_record(const CorpusRecord& record, const EmbeddingProvider& provider,
                          const PipelineConfig& config, StageTimings* timings = nullptr);

/// Fresh run. A configured checkpoint file is truncated and then appended to
/// as records complete.
ScoringRun run_scoring(std::span<const CorpusRecord> records, const EmbeddingProvider& provider,
                       const PipelineConfig& config);

/// Like run_scoring, but ids already present in the checkpoint are taken
/// from it rather than recomputed. A missing checkpoint means a fresh run.
ScoringRun resume(std::span<const CorpusRecord> records, const EmbeddingProvider& provider,
                  const PipelineConfig& config);

struct BenchmarkOptions {
  std::size_t n_records = 1000;
  std::size_t sentences_per_record = 15;
  std::size_t dimension = MockProvider::kDefaultDimension;
  std::size_t parallelism = 1;
  std::uint64_t seed = 1;
};

/// Records whose narratives segment into exactly `sentences_per_record`
/// distinct lowercase sentences.
std::vector<CorpusRecord> synthesize_records(std::size_t n_records,
                                             std::size_t sentences_per_record, std::uint64_t seed);

RunReport benchmark(const BenchmarkOptions& options);

}  // namespace dsi
