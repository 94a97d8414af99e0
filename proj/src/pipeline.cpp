#include "dsi/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "dsi/error.hpp"
#include "dsi/random.hpp"
#include "json.hpp"

namespace dsi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Serializes checkpoint appends from all workers.
class CheckpointWriter {
 public:
  CheckpointWriter(const std::filesystem::path& path, bool truncate, std::size_t every)
      : path_(path), every_(std::max<std::size_t>(every, 1)) {
    out_.open(path, std::ios::binary | (truncate ? std::ios::trunc : std::ios::app));
    if (!out_) throw Error(ErrorCode::kIoError, "cannot open checkpoint '" + path.string() + "'");
  }

  void append(const ScoredRecord& scored) {
    auto line = format_score_line(scored);
    std::lock_guard lock(mutex_);
    pending_ += line;
    pending_ += '\n';
    if (++pending_count_ >= every_) flush_locked();
  }

  void flush() {
    std::lock_guard lock(mutex_);
    flush_locked();
  }

 private:
  void flush_locked() {
    if (pending_.empty()) return;
    out_ << pending_;
    out_.flush();
    if (!out_) throw Error(ErrorCode::kIoError, "checkpoint write to '" + path_.string() + "' failed");
    pending_.clear();
    pending_count_ = 0;
  }

  std::filesystem::path path_;
  std::size_t every_;
  std::ofstream out_;
  std::mutex mutex_;
  std::string pending_;
  std::size_t pending_count_ = 0;
};

void check_unique_ids(std::span<const CorpusRecord> records) {
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw Error(ErrorCode::kDuplicateId, "id '" + r.id + "' repeats");
  }
}

ScoringRun execute(std::span<const CorpusRecord> records, const EmbeddingProvider& provider,
                   const PipelineConfig& config,
                   std::unordered_map<std::string, ScoredRecord> done, bool truncate_checkpoint,
                   std::vector<std::string> warnings) {
  if (config.parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  if (config.checkpoint_every < 1) {
    throw Error(ErrorCode::kInvalidArgument, "checkpoint_every must be >= 1");
  }
  check_unique_ids(records);
  const auto start = Clock::now();

  std::optional<CheckpointWriter> checkpoint;
  if (config.checkpoint_path) {
    checkpoint.emplace(*config.checkpoint_path, truncate_checkpoint, config.checkpoint_every);
  }

  std::vector<std::optional<ScoredRecord>> results(records.size());
  std::vector<std::size_t> todo;
  std::size_t from_checkpoint = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto it = done.find(records[i].id); it != done.end()) {
      ScoredRecord s = std::move(it->second);
      s.record = records[i];
      results[i] = std::move(s);
      ++from_checkpoint;
    } else {
      todo.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t workers = std::min(config.parallelism, std::max<std::size_t>(todo.size(), 1));
  std::vector<StageTimings> timings(workers);

  auto work = [&](std::size_t w) {
    try {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) return;
        const std::size_t i = todo[k];
        auto scored = score_record(records[i], provider, config, &timings[w]);
        if (checkpoint) checkpoint->append(scored);
        results[i] = std::move(scored);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      failed = true;
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (checkpoint) {
    try {
      checkpoint->flush();
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  ScoringRun run;
  run.scored.reserve(records.size());
  for (auto& r : results) run.scored.push_back(std::move(*r));
  std::sort(run.scored.begin(), run.scored.end(),
            [](const auto& a, const auto& b) { return a.record.id < b.record.id; });

  auto& rep = run.report;
  rep.input_count = records.size();
  rep.records_from_checkpoint = from_checkpoint;
  for (const auto& s : run.scored) {
    if (s.dsi) {
      ++rep.records_scored;
    } else {
      ++rep.records_skipped;
      ++rep.skipped_by_reason[std::string(to_string(*s.skipped_reason))];
    }
  }
  for (const auto& t : timings) {
    rep.stages.segment_seconds += t.segment_seconds;
    rep.stages.embed_seconds += t.embed_seconds;
    rep.stages.dsi_seconds += t.dsi_seconds;
  }
  rep.wall_seconds = seconds_since(start);
  rep.throughput = rep.wall_seconds > 0.0 ? static_cast<double>(todo.size()) / rep.wall_seconds : 0.0;
  rep.warnings = std::move(warnings);
  return run;
}

}  // namespace

std::string to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["records_scored"] = report.records_scored;
  j["records_skipped"] = report.records_skipped;
  j["records_from_checkpoint"] = report.records_from_checkpoint;
  j["skipped_by_reason"] = report.skipped_by_reason;
  j["input_count"] = report.input_count;
  j["wall_seconds"] = report.wall_seconds;
  j["throughput_records_per_second"] = report.throughput;
  j["stages"] = {{"segment_seconds", report.stages.segment_seconds},
                 {"embed_seconds", report.stages.embed_seconds},
                 {"dsi_seconds", report.stages.dsi_seconds}};
  j["warnings"] = report.warnings;
  return j.dump(2);
}

ScoredRecord score_record(const CorpusRecord& record, const EmbeddingProvider& provider,
                          const PipelineConfig& config, StageTimings* timings) {
  ScoredRecord out;
  out.record = record;
  StageTimings local;

  auto t0 = Clock::now();
  const Segmenter segmenter(config.segmenter);
  const auto sentences =
      segmenter.segment(compose_narrative(record.title, record.abstract), record.id);
  local.segment_seconds = seconds_since(t0);

  auto finish = [&](ScoredRecord&& s) {
    if (timings) {
      timings->segment_seconds += local.segment_seconds;
      timings->embed_seconds += local.embed_seconds;
      timings->dsi_seconds += local.dsi_seconds;
    }
    return std::move(s);
  };

  if (provider.consumes_text() && sentences.size() < kMinSentences) {
    out.skipped_reason = SkipReason::kTooFewSentences;
    return finish(std::move(out));
  }

  t0 = Clock::now();
  std::optional<EmbeddingSet> embeddings;
  for (std::size_t attempt = 0; !embeddings; ++attempt) {
    try {
      embeddings = provider.embed_sentences(sentences, config.dsi.layers);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMissingEmbedding) {
        local.embed_seconds = seconds_since(t0);
        out.skipped_reason = SkipReason::kMissingEmbedding;
        return finish(std::move(out));
      }
      if (attempt >= config.retry_budget) break;
    } catch (const std::exception&) {
      if (attempt >= config.retry_budget) break;
    }
  }
  local.embed_seconds = seconds_since(t0);
  if (!embeddings) {
    out.skipped_reason = SkipReason::kProviderFailure;
    return finish(std::move(out));
  }

  t0 = Clock::now();
  if (embeddings->sentence_count() < kMinSentences) {
    out.skipped_reason = SkipReason::kTooFewSentences;
  } else {
    out.dsi = dsi(*embeddings, config.dsi);
  }
  local.dsi_seconds = seconds_since(t0);
  return finish(std::move(out));
}

ScoringRun run_scoring(std::span<const CorpusRecord> records, const EmbeddingProvider& provider,
                       const PipelineConfig& config) {
  return execute(records, provider, config, {}, true, {});
}

ScoringRun resume(std::span<const CorpusRecord> records, const EmbeddingProvider& provider,
                  const PipelineConfig& config) {
  if (!config.checkpoint_path) {
    throw Error(ErrorCode::kInvalidArgument, "resume needs a checkpoint path");
  }
  const auto& path = *config.checkpoint_path;
  std::unordered_map<std::string, ScoredRecord> done;
  std::vector<std::string> warnings;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read checkpoint '" + path.string() + "'");
    std::unordered_set<std::string_view> wanted;
    for (const auto& r : records) wanted.insert(r.id);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      ScoredRecord s;
      try {
        s = parse_score_line(line);
      } catch (const Error& e) {
        throw Error(ErrorCode::kCorruptCheckpoint,
                    path.string() + ":" + std::to_string(line_no) + ": " + e.message());
      }
      if (!wanted.contains(s.record.id)) {
        warnings.push_back("checkpoint id '" + s.record.id + "' (line " +
                           std::to_string(line_no) + ") is not in the input; ignored");
        continue;
      }
      done.insert_or_assign(s.record.id, std::move(s));
    }
  }
  return execute(records, provider, config, std::move(done), false, std::move(warnings));
}

std::vector<CorpusRecord> synthesize_records(std::size_t n_records,
                                             std::size_t sentences_per_record,
                                             std::uint64_t seed) {
  static constexpr std::array<std::string_view, 32> kWords = {
      "model",    "signal",   "protein",  "network",  "sample",   "theory",  "measure",
      "cell",     "patient",  "energy",   "policy",   "market",   "image",   "surface",
      "response", "method",   "growth",   "language", "climate",  "risk",    "field",
      "data",     "process",  "system",   "effect",   "structure", "tissue", "outcome",
      "learning", "pressure", "dynamics", "variance"};
  std::vector<CorpusRecord> out;
  out.reserve(n_records);
  SplitMix64 rng(seed);
  for (std::size_t r = 0; r < n_records; ++r) {
    std::vector<std::string> sentences;
    for (std::size_t s = 0; s < sentences_per_record; ++s) {
      std::string sentence = "Sentence " + std::to_string(s);
      const std::size_t words = 6 + rng.bounded(10);
      for (std::size_t w = 0; w < words; ++w) {
        sentence += ' ';
        sentence += kWords[rng.bounded(kWords.size())];
      }
      sentences.push_back(std::move(sentence));
    }
    CorpusRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "bench-%07zu", r);
    rec.id = id;
    if (!sentences.empty()) rec.title = sentences.front();
    for (std::size_t s = 1; s < sentences.size(); ++s) {
      if (s > 1) rec.abstract += ' ';
      rec.abstract += sentences[s];
      rec.abstract += '.';
    }
    rec.primary_subject = "Synthetic";
    rec.publication_year = 2000 + static_cast<int>(r % 19);
    out.push_back(std::move(rec));
  }
  return out;
}

RunReport benchmark(const BenchmarkOptions& options) {
  const auto records =
      synthesize_records(options.n_records, options.sentences_per_record, options.seed);
  const MockProvider provider(options.dimension);
  PipelineConfig config;
  config.parallelism = options.parallelism;
  return run_scoring(records, provider, config).report;
}

}  // namespace dsi
