#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dsi {

struct RawDocument {
  std::string id;
  std::string title;
  std::string abstract;
};

struct SentenceList {
  std::string source_id;
  std::vector<std::string> sentences;

  std::size_t size() const noexcept { return sentences.size(); }
  bool empty() const noexcept { return sentences.empty(); }
};

/// Joins a title and an abstract into one narrative. A ". " separator is
/// inserted unless the trimmed title already ends in '.', '!' or '?'.
std::string compose_narrative(std::string_view title, std::string_view abstract);

/// Number of U+0020 characters; tabs, newlines and other spaces are ignored.
std::size_t count_spaces(std::string_view text) noexcept;

inline constexpr std::size_t kDefaultMinSpaces = 199;
inline constexpr std::size_t kDefaultMaxSpaces = 299;

/// Inclusive on both ends. Throws ErrorCode::kInvalidRange if min > max.
bool passes_length_filter(std::string_view abstract, std::size_t min_spaces = kDefaultMinSpaces,
                          std::size_t max_spaces = kDefaultMaxSpaces);

/// Maximal runs of non-whitespace (ASCII space, tab, CR, LF, VT, FF).
std::size_t count_words(std::string_view text) noexcept;

inline constexpr std::size_t kDefaultMinWords = 200;
inline constexpr std::size_t kDefaultMaxWords = 300;

/// Word-count counterpart of passes_length_filter; same bounds contract.
bool passes_word_filter(std::string_view abstract, std::size_t min_words = kDefaultMinWords,
                        std::size_t max_words = kDefaultMaxWords);

/// Tokens whose trailing '.' never ends a sentence. Single uppercase
/// initials ("J.") are protected separately.
const std::vector<std::string>& default_abbreviations();

struct SegmenterOptions {
  std::vector<std::string> extra_abbreviations;
};

// Rule-based splitter. A boundary is '.', '!' or '?' (optionally followed by
// closing quotes/brackets), then whitespace, then an uppercase letter, digit
// or opening quote/bracket. Protected abbreviations, initials and decimals
// never split.
class Segmenter {
 public:
  Segmenter() : Segmenter(SegmenterOptions{}) {}
  explicit Segmenter(const SegmenterOptions& options);

  SentenceList segment(std::string_view text, std::string source_id = {}) const;

 private:
  bool is_protected(std::string_view text, std::size_t terminator) const;

  std::vector<std::string> abbreviations_;
};

/// Segments with the default abbreviation list.
SentenceList segment(std::string_view text, std::string source_id = {});

std::string_view trim(std::string_view text) noexcept;

}  // namespace dsi
