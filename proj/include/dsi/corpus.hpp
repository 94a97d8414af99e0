#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsi/core.hpp"

namespace dsi {

struct CorpusRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::string primary_subject;
  int publication_year = 0;
  std::int64_t cit3 = 0;
  std::int64_t cit5 = 0;
  std::int64_t cit_total = 0;
  std::optional<std::string> field;

  bool operator==(const CorpusRecord&) const = default;
};

/// Year range, nonnegative counts, cit3/cit5 not above cit_total.
/// Returns an empty string when valid, otherwise the first violation.
std::string validate_record(const CorpusRecord& r);

enum class RecordFormat { kJsonl, kCsv };
RecordFormat parse_record_format(std::string_view text);

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct IngestOptions {
  // Collect malformed rows in IngestResult::errors instead of throwing.
  bool permissive = false;
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  std::vector<RowError> errors;
};

IngestResult read_records(std::istream& in, RecordFormat format, const IngestOptions& options = {});
IngestResult ingest(const std::filesystem::path& path, RecordFormat format,
                    const IngestOptions& options = {});

void write_records(std::ostream& out, std::span<const CorpusRecord> records, RecordFormat format);
void save_records(const std::filesystem::path& path, std::span<const CorpusRecord> records,
                  RecordFormat format);

/// Splits one CSV document into rows. Quoted fields may contain commas,
/// doubled quotes and newlines. Each row carries the line it starts on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::istream& in);
std::string csv_escape(std::string_view field);

struct FieldMapping {
  std::map<std::string, std::string, std::less<>> entries;

  static FieldMapping read(std::istream& in);
  static FieldMapping load(const std::filesystem::path& path);
};

struct MappingReport {
  // Unmapped subject -> number of records excluded.
  std::map<std::string, std::size_t> unmapped;
};

/// Sets `field` from the subject. Strict mode throws kUnmappedSubject;
/// otherwise unmapped records are dropped and counted in `report`.
std::vector<CorpusRecord> map_fields(std::span<const CorpusRecord> records,
                                     const FieldMapping& mapping, bool strict,
                                     MappingReport* report = nullptr);

struct FilterOptions {
  std::size_t min_spaces = kDefaultMinSpaces;
  std::size_t max_spaces = kDefaultMaxSpaces;
  // Optional word-count bounds applied on top of the space filter.
  std::optional<std::size_t> min_words;
  std::optional<std::size_t> max_words;
  std::set<int> exclude_years;
};

std::vector<CorpusRecord> filter_records(std::span<const CorpusRecord> records,
                                         const FilterOptions& options = {});

inline constexpr int kDefaultCitationCutoffYear = 2018;

/// Keeps publication_year <= last_publication_year.
std::vector<CorpusRecord> citation_window_filter(
    std::span<const CorpusRecord> records, int last_publication_year = kDefaultCitationCutoffYear);

/// Restricts to the `count` subjects with the most records (ties broken by
/// subject name). Order is preserved.
std::vector<CorpusRecord> top_subjects(std::span<const CorpusRecord> records, std::size_t count);

struct SampleOptions {
  std::size_t per_subject = 1000;
  std::uint64_t seed = 0;
  // Spread each subject's quota evenly over its publication years.
  bool per_year = false;
};

/// Seeded sample without replacement per subject. Subjects come out in
/// lexicographic order; within a subject, records keep their input order.
std::vector<CorpusRecord> sample_per_subject(std::span<const CorpusRecord> records,
                                             const SampleOptions& options);

/// Indices [0, m) shuffled with Fisher-Yates driven by splitmix64(key).
std::vector<std::size_t> keyed_shuffle(std::size_t m, std::uint64_t key);

enum class SkipReason { kTooFewSentences, kMissingEmbedding, kProviderFailure };
std::string_view to_string(SkipReason reason);
SkipReason parse_skip_reason(std::string_view text);

struct ScoredRecord {
  CorpusRecord record;
  std::optional<DsiScore> dsi;
  std::optional<SkipReason> skipped_reason;

  bool operator==(const ScoredRecord&) const = default;
};

/// One JSON object, no trailing newline.
std::string format_score_line(const ScoredRecord& scored);
/// Throws dsi::Error (no location; callers add it).
ScoredRecord parse_score_line(std::string_view line);

void write_scores(std::ostream& out, std::span<const ScoredRecord> scored);
std::vector<ScoredRecord> read_scores(std::istream& in);
void persist_scores(std::span<const ScoredRecord> scored, const std::filesystem::path& path);
std::vector<ScoredRecord> load_scores(const std::filesystem::path& path);

}  // namespace dsi
