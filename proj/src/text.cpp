#include "dsi/text.hpp"

#include <algorithm>
#include <array>

#include "dsi/error.hpp"

namespace dsi {

namespace {

bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool is_ascii_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }

// Multi-byte quotes, as raw UTF-8.
constexpr std::string_view kLeftDouble = "\xE2\x80\x9C";
constexpr std::string_view kRightDouble = "\xE2\x80\x9D";
constexpr std::string_view kLeftSingle = "\xE2\x80\x98";
constexpr std::string_view kRightSingle = "\xE2\x80\x99";

// Length in bytes of a closing quote/bracket at `pos`, or 0.
std::size_t closer_length(std::string_view text, std::size_t pos) noexcept {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  const auto rest = text.substr(pos);
  if (rest.starts_with(kRightDouble) || rest.starts_with(kRightSingle)) return 3;
  return 0;
}

std::size_t opener_length(std::string_view text, std::size_t pos) noexcept {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[' || c == '{') return 1;
  const auto rest = text.substr(pos);
  if (rest.starts_with(kLeftDouble) || rest.starts_with(kLeftSingle)) return 3;
  return 0;
}

// Decodes one UTF-8 code point; malformed input yields U+FFFD.
char32_t decode_utf8(std::string_view text, std::size_t pos) noexcept {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= text.size()) return -1;
    const auto b = static_cast<unsigned char>(text[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return b0;
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 < 0) return char32_t{0xFFFD};
    return (char32_t(b0 & 0x1F) << 6) | char32_t(c1);
  }
  if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 < 0 || c2 < 0) return char32_t{0xFFFD};
    return (char32_t(b0 & 0x0F) << 12) | (char32_t(c1) << 6) | char32_t(c2);
  }
  return char32_t{0xFFFD};
}

// ASCII, Latin-1, Latin Extended-A (even code points) and Greek capitals.
bool is_uppercase_letter(char32_t cp) noexcept {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;
  if (cp >= 0x100 && cp <= 0x17F) return cp % 2 == 0;
  if (cp >= 0x391 && cp <= 0x3A9) return true;
  return false;
}

bool starts_sentence(std::string_view text, std::size_t pos) noexcept {
  if (is_ascii_digit(text[pos])) return true;
  if (opener_length(text, pos) > 0) return true;
  return is_uppercase_letter(decode_utf8(text, pos));
}

bool is_token_start(std::string_view text, std::size_t pos) noexcept {
  return pos == 0 || is_ascii_space(text[pos - 1]) || opener_length(text, pos - 1) == 1;
}

}  // namespace

std::string_view trim(std::string_view text) noexcept {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_ascii_space(text[b])) ++b;
  while (e > b && is_ascii_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::string compose_narrative(std::string_view title, std::string_view abstract) {
  const auto t = trim(title);
  const auto a = trim(abstract);
  if (t.empty()) return std::string(a);
  if (a.empty()) return std::string(t);
  std::string out(t);
  out += is_terminator(t.back()) ? " " : ". ";
  out += a;
  return out;
}

std::size_t count_spaces(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), ' '));
}

bool passes_length_filter(std::string_view abstract, std::size_t min_spaces,
                          std::size_t max_spaces) {
  if (min_spaces > max_spaces) {
    throw Error(ErrorCode::kInvalidRange, "min_spaces " + std::to_string(min_spaces) +
                                              " exceeds max_spaces " + std::to_string(max_spaces));
  }
  const auto n = count_spaces(abstract);
  return n >= min_spaces && n <= max_spaces;
}

std::size_t count_words(std::string_view text) noexcept {
  std::size_t n = 0;
  bool in_word = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

bool passes_word_filter(std::string_view abstract, std::size_t min_words, std::size_t max_words) {
  if (min_words > max_words) {
    throw Error(ErrorCode::kInvalidRange, "min_words " + std::to_string(min_words) +
                                              " exceeds max_words " + std::to_string(max_words));
  }
  const auto n = count_words(abstract);
  return n >= min_words && n <= max_words;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> kList = {"e.g.", "i.e.", "et al.", "vs.",
                                                 "Fig.", "cf.",  "Dr.",    "No."};
  return kList;
}

Segmenter::Segmenter(const SegmenterOptions& options) : abbreviations_(default_abbreviations()) {
  for (const auto& extra : options.extra_abbreviations) {
    const auto t = trim(extra);
    if (!t.empty() && t.back() == '.') abbreviations_.emplace_back(t);
  }
}

bool Segmenter::is_protected(std::string_view text, std::size_t terminator) const {
  const std::size_t end = terminator + 1;
  // Decimal number: digit '.' digit.
  if (terminator > 0 && end < text.size() && is_ascii_digit(text[terminator - 1]) &&
      is_ascii_digit(text[end])) {
    return true;
  }
  for (const auto& abbr : abbreviations_) {
    if (abbr.size() > end) continue;
    const std::size_t begin = end - abbr.size();
    if (text.substr(begin, abbr.size()) == abbr && is_token_start(text, begin)) return true;
  }
  // Initials: one or more "X." groups forming the whole token, e.g. "J." or "J.R.".
  std::size_t begin = end;
  while (begin >= 2 && text[begin - 1] == '.' && is_ascii_upper(text[begin - 2])) {
    begin -= 2;
  }
  return begin < end && is_token_start(text, begin);
}

SentenceList Segmenter::segment(std::string_view text, std::string source_id) const {
  SentenceList out;
  out.source_id = std::move(source_id);
  auto emit = [&](std::string_view span) {
    const auto t = trim(span);
    if (!t.empty()) out.sentences.emplace_back(t);
  };

  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t pos = 0;
  while (pos < n) {
    if (!is_terminator(text[pos])) {
      ++pos;
      continue;
    }
    std::size_t end = pos + 1;
    while (end < n) {
      const auto len = closer_length(text, end);
      if (len == 0) break;
      end += len;
    }
    if (end >= n || !is_ascii_space(text[end])) {
      pos = end > pos + 1 ? end : pos + 1;
      continue;
    }
    std::size_t next = end;
    while (next < n && is_ascii_space(text[next])) ++next;
    if (next >= n || !starts_sentence(text, next) ||
        (text[pos] == '.' && is_protected(text, pos))) {
      pos = next;
      continue;
    }
    emit(text.substr(start, end - start));
    start = next;
    pos = next;
  }
  if (start < n) emit(text.substr(start));
  return out;
}

SentenceList segment(std::string_view text, std::string source_id) {
  static const Segmenter kDefault;
  return kDefault.segment(text, std::move(source_id));
}

}  // namespace dsi
