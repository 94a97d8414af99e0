#include "dsi/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "dsi/error.hpp"
#include "dsi/random.hpp"
#include "json.hpp"

namespace dsi {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 8> kRequiredColumns = {
    "id", "title", "abstract", "primary_subject", "publication_year", "cit3", "cit5", "cit_total"};

std::int64_t parse_int(std::string_view text, std::string_view column) {
  const auto t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kParseError,
                "column '" + std::string(column) + "': '" + std::string(text) + "' is not an integer");
  }
  return value;
}

std::int64_t json_int(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kMissingColumn, std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::kParseError,
                std::string("field '") + key + "': " + it->dump() + " is not an integer");
  }
  return it->get<std::int64_t>();
}

std::string json_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kMissingColumn, std::string("missing field '") + key + "'");
  if (!it->is_string()) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

int checked_year(std::int64_t year) {
  if (year < 1900 || year > 2100) {
    throw Error(ErrorCode::kValidation, "publication_year " + std::to_string(year) +
                                            " outside [1900, 2100]");
  }
  return static_cast<int>(year);
}

void check_record(const CorpusRecord& r) {
  if (auto problem = validate_record(r); !problem.empty()) {
    throw Error(ErrorCode::kValidation, problem);
  }
}

CorpusRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "line is not a JSON object");
  CorpusRecord r;
  r.id = json_string(j, "id");
  r.title = json_string(j, "title");
  r.abstract = json_string(j, "abstract");
  r.primary_subject = json_string(j, "primary_subject");
  r.publication_year = checked_year(json_int(j, "publication_year"));
  r.cit3 = json_int(j, "cit3");
  r.cit5 = json_int(j, "cit5");
  r.cit_total = json_int(j, "cit_total");
  if (const auto it = j.find("field"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kParseError, "field 'field' must be a string");
    r.field = it->get<std::string>();
  }
  check_record(r);
  return r;
}

void record_to_json(ordered_json& j, const CorpusRecord& r) {
  j["id"] = r.id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["primary_subject"] = r.primary_subject;
  j["publication_year"] = r.publication_year;
  j["cit3"] = r.cit3;
  j["cit5"] = r.cit5;
  j["cit_total"] = r.cit_total;
  if (r.field) j["field"] = *r.field;
}

// Collects row errors or rethrows them, depending on the options.
class RowSink {
 public:
  explicit RowSink(const IngestOptions& options, IngestResult& result)
      : options_(options), result_(result) {}

  void accept(std::size_t line, CorpusRecord record) {
    if (!ids_.insert(record.id).second) {
      fail(line, Error(ErrorCode::kDuplicateId, "id '" + record.id + "' already seen"));
      return;
    }
    result_.records.push_back(std::move(record));
  }

  void fail(std::size_t line, const Error& e) {
    if (!options_.permissive) {
      throw Error(e.code(), "line " + std::to_string(line) + ": " + e.message());
    }
    result_.errors.push_back({line, std::string(e.what())});
  }

 private:
  const IngestOptions& options_;
  IngestResult& result_;
  std::unordered_set<std::string> ids_;
};

void read_jsonl(std::istream& in, RowSink& sink) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, e.what());
      }
      sink.accept(line_no, record_from_json(j));
    } catch (const Error& e) {
      sink.fail(line_no, e);
    }
  }
}

void read_csv(std::istream& in, RowSink& sink) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::kMissingColumn, "CSV input has no header row");
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t c = 0; c < rows.front().fields.size(); ++c) {
    column.emplace(std::string(trim(rows.front().fields[c])), c);
  }
  for (const auto name : kRequiredColumns) {
    if (!column.contains(name)) {
      throw Error(ErrorCode::kMissingColumn, "CSV header lacks column '" + std::string(name) + "'");
    }
  }
  const auto field_col = column.find("field");
  const std::size_t width = rows.front().fields.size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;
    try {
      if (row.fields.size() != width) {
        throw Error(ErrorCode::kParseError, "expected " + std::to_string(width) + " fields, found " +
                                                std::to_string(row.fields.size()));
      }
      auto at = [&](std::string_view name) -> const std::string& {
        return row.fields[column.find(name)->second];
      };
      CorpusRecord rec;
      rec.id = at("id");
      rec.title = at("title");
      rec.abstract = at("abstract");
      rec.primary_subject = at("primary_subject");
      rec.publication_year = checked_year(parse_int(at("publication_year"), "publication_year"));
      rec.cit3 = parse_int(at("cit3"), "cit3");
      rec.cit5 = parse_int(at("cit5"), "cit5");
      rec.cit_total = parse_int(at("cit_total"), "cit_total");
      if (field_col != column.end() && !row.fields[field_col->second].empty()) {
        rec.field = row.fields[field_col->second];
      }
      check_record(rec);
      sink.accept(row.line, std::move(rec));
    } catch (const Error& e) {
      sink.fail(row.line, e);
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string validate_record(const CorpusRecord& r) {
  if (r.id.empty()) return "empty id";
  if (r.publication_year < 1900 || r.publication_year > 2100) {
    return "publication_year " + std::to_string(r.publication_year) + " outside [1900, 2100]";
  }
  if (r.cit3 < 0 || r.cit5 < 0 || r.cit_total < 0) return "negative citation count";
  if (r.cit3 > r.cit_total) return "cit3 exceeds cit_total";
  if (r.cit5 > r.cit_total) return "cit5 exceeds cit_total";
  return {};
}

RecordFormat parse_record_format(std::string_view text) {
  if (text == "jsonl") return RecordFormat::kJsonl;
  if (text == "csv") return RecordFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown format '" + std::string(text) + "'");
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string field;
  CsvRow row;
  std::size_t line = 1;
  bool in_quotes = false;
  bool row_started = false;
  bool field_was_quoted = false;
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = CsvRow{};
    row_started = false;
  };
  char c = 0;
  while (in.get(c)) {
    if (!row_started) {
      row.line = line;
      row_started = true;
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
        } else {
          field += c;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() != '\n') field += c;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(row.line) + ": unterminated quoted field");
  }
  if (row_started) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

IngestResult read_records(std::istream& in, RecordFormat format, const IngestOptions& options) {
  IngestResult result;
  RowSink sink(options, result);
  if (format == RecordFormat::kJsonl) {
    read_jsonl(in, sink);
  } else {
    read_csv(in, sink);
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& path, RecordFormat format,
                    const IngestOptions& options) {
  auto in = open_input(path);
  try {
    auto result = read_records(in, format, options);
    for (auto& e : result.errors) e.message = path.string() + ":" + std::to_string(e.line) + ": " + e.message;
    return result;
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_records(std::ostream& out, std::span<const CorpusRecord> records, RecordFormat format) {
  if (format == RecordFormat::kJsonl) {
    for (const auto& r : records) {
      ordered_json j;
      record_to_json(j, r);
      out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
    return;
  }
  const bool with_field =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.field.has_value(); });
  out << "id,title,abstract,primary_subject,publication_year,cit3,cit5,cit_total";
  out << (with_field ? ",field\n" : "\n");
  for (const auto& r : records) {
    out << csv_escape(r.id) << ',' << csv_escape(r.title) << ',' << csv_escape(r.abstract) << ','
        << csv_escape(r.primary_subject) << ',' << r.publication_year << ',' << r.cit3 << ','
        << r.cit5 << ',' << r.cit_total;
    if (with_field) out << ',' << csv_escape(r.field.value_or(""));
    out << '\n';
  }
}

void save_records(const std::filesystem::path& path, std::span<const CorpusRecord> records,
                  RecordFormat format) {
  auto out = open_output(path);
  write_records(out, records, format);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
}

FieldMapping FieldMapping::read(std::istream& in) {
  FieldMapping mapping;
  const auto rows = parse_csv(in);
  bool header_seen = false;
  for (const auto& row : rows) {
    if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;
    if (row.fields.size() != 2) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(row.line) + ": expected 2 columns (subject,field)");
    }
    const auto subject = std::string(trim(row.fields[0]));
    const auto field = std::string(trim(row.fields[1]));
    if (!header_seen) {
      header_seen = true;
      if (subject == "subject" && field == "field") continue;
    }
    if (subject.empty() || field.empty()) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(row.line) + ": empty label");
    }
    if (!mapping.entries.emplace(subject, field).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(row.line) + ": subject '" + subject + "' mapped twice");
    }
  }
  if (mapping.entries.empty()) throw Error(ErrorCode::kValidation, "field mapping is empty");
  return mapping;
}

FieldMapping FieldMapping::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

std::vector<CorpusRecord> map_fields(std::span<const CorpusRecord> records,
                                     const FieldMapping& mapping, bool strict,
                                     MappingReport* report) {
  if (mapping.entries.empty()) throw Error(ErrorCode::kValidation, "field mapping is empty");
  std::vector<CorpusRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = mapping.entries.find(r.primary_subject);
    if (it == mapping.entries.end()) {
      if (strict) {
        throw Error(ErrorCode::kUnmappedSubject,
                    "subject '" + r.primary_subject + "' (record '" + r.id + "') has no field");
      }
      if (report) ++report->unmapped[r.primary_subject];
      continue;
    }
    out.push_back(r);
    out.back().field = it->second;
  }
  return out;
}

std::vector<CorpusRecord> filter_records(std::span<const CorpusRecord> records,
                                         const FilterOptions& options) {
  if (options.min_spaces > options.max_spaces) {
    throw Error(ErrorCode::kInvalidRange, "min_spaces exceeds max_spaces");
  }
  const bool words = options.min_words || options.max_words;
  const std::size_t min_words = options.min_words.value_or(0);
  const std::size_t max_words = options.max_words.value_or(std::numeric_limits<std::size_t>::max());
  if (min_words > max_words) throw Error(ErrorCode::kInvalidRange, "min_words exceeds max_words");
  std::vector<CorpusRecord> out;
  for (const auto& r : records) {
    if (options.exclude_years.contains(r.publication_year)) continue;
    if (!passes_length_filter(r.abstract, options.min_spaces, options.max_spaces)) continue;
    if (words && !passes_word_filter(r.abstract, min_words, max_words)) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<CorpusRecord> citation_window_filter(std::span<const CorpusRecord> records,
                                                 int last_publication_year) {
  std::vector<CorpusRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const auto& r) { return r.publication_year <= last_publication_year; });
  return out;
}

std::vector<CorpusRecord> top_subjects(std::span<const CorpusRecord> records, std::size_t count) {
  std::map<std::string, std::size_t> sizes;
  for (const auto& r : records) ++sizes[r.primary_subject];
  std::vector<std::pair<std::string, std::size_t>> ranked(sizes.begin(), sizes.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > count) ranked.resize(count);
  std::set<std::string, std::less<>> keep;
  for (const auto& [subject, n] : ranked) keep.insert(subject);
  std::vector<CorpusRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const auto& r) { return keep.contains(r.primary_subject); });
  return out;
}

std::vector<std::size_t> keyed_shuffle(std::size_t m, std::uint64_t key) {
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  SplitMix64 rng(key);
  for (std::size_t i = m; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<CorpusRecord> sample_per_subject(std::span<const CorpusRecord> records,
                                             const SampleOptions& options) {
  if (options.per_subject < 1) throw Error(ErrorCode::kInvalidArgument, "per_subject must be >= 1");
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < records.size(); ++i) by_subject[records[i].primary_subject].push_back(i);

  std::vector<CorpusRecord> out;
  for (const auto& [subject, members] : by_subject) {
    const std::uint64_t key = options.seed ^ fnv1a64(subject);
    std::vector<std::size_t> chosen;
    if (!options.per_year) {
      const auto order = keyed_shuffle(members.size(), key);
      const std::size_t take = std::min(options.per_subject, members.size());
      for (std::size_t k = 0; k < take; ++k) chosen.push_back(members[order[k]]);
    } else {
      std::map<int, std::vector<std::size_t>> by_year;
      for (const auto i : members) by_year[records[i].publication_year].push_back(i);
      // Water-fill the quota one slot per year, ascending, until full or exhausted.
      std::map<int, std::size_t> quota;
      std::size_t remaining = std::min(options.per_subject, members.size());
      while (remaining > 0) {
        for (const auto& [year, pool] : by_year) {
          if (remaining == 0) break;
          if (quota[year] < pool.size()) {
            ++quota[year];
            --remaining;
          }
        }
      }
      for (const auto& [year, pool] : by_year) {
        const auto order =
            keyed_shuffle(pool.size(), key ^ (static_cast<std::uint64_t>(year) * kGoldenGamma));
        for (std::size_t k = 0; k < quota[year]; ++k) chosen.push_back(pool[order[k]]);
      }
    }
    std::sort(chosen.begin(), chosen.end());
    for (const auto i : chosen) out.push_back(records[i]);
  }
  return out;
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::kTooFewSentences: return "too-few-sentences";
    case SkipReason::kMissingEmbedding: return "missing-embedding";
    case SkipReason::kProviderFailure: return "provider-failure";
  }
  return "unknown";
}

SkipReason parse_skip_reason(std::string_view text) {
  if (text == "too-few-sentences") return SkipReason::kTooFewSentences;
  if (text == "missing-embedding") return SkipReason::kMissingEmbedding;
  if (text == "provider-failure") return SkipReason::kProviderFailure;
  throw Error(ErrorCode::kParseError, "unknown skipped_reason '" + std::string(text) + "'");
}

std::string format_score_line(const ScoredRecord& scored) {
  ordered_json j;
  record_to_json(j, scored.record);
  if (scored.dsi) {
    j["dsi"] = scored.dsi->value;
    j["n_sentences"] = scored.dsi->n_sentences;
    j["n_pairs"] = scored.dsi->n_pairs;
    j["normalization"] = to_string(scored.dsi->normalization);
  }
  if (scored.skipped_reason) j["skipped_reason"] = to_string(*scored.skipped_reason);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ScoredRecord parse_score_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  ScoredRecord s;
  s.record = record_from_json(j);
  const bool has_dsi = j.contains("dsi");
  const bool has_skip = j.contains("skipped_reason");
  if (has_dsi == has_skip) {
    throw Error(ErrorCode::kValidation, "record '" + s.record.id +
                                            "' must carry exactly one of dsi and skipped_reason");
  }
  if (has_dsi) {
    if (!j["dsi"].is_number()) throw Error(ErrorCode::kParseError, "field 'dsi' must be a number");
    DsiScore score;
    score.value = j["dsi"].get<double>();
    score.n_sentences = static_cast<std::size_t>(json_int(j, "n_sentences"));
    if (j.contains("n_pairs")) {
      score.n_pairs = static_cast<std::size_t>(json_int(j, "n_pairs"));
    } else {
      // Files without the column predate it; they were scored on the two default layers.
      const std::size_t l = default_layers().size();
      score.n_pairs = l * l * score.n_sentences * (score.n_sentences - 1) / 2;
    }
    score.normalization = parse_normalization(json_string(j, "normalization"));
    s.dsi = score;
  } else {
    s.skipped_reason = parse_skip_reason(json_string(j, "skipped_reason"));
  }
  return s;
}

void write_scores(std::ostream& out, std::span<const ScoredRecord> scored) {
  for (const auto& s : scored) out << format_score_line(s) << '\n';
}

std::vector<ScoredRecord> read_scores(std::istream& in) {
  std::vector<ScoredRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_score_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  return out;
}

void persist_scores(std::span<const ScoredRecord> scored, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_scores(out, scored);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
}

std::vector<ScoredRecord> load_scores(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_scores(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace dsi
