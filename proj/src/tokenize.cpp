#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "allin1/corpus.hpp"
#include "utf8.hpp"

namespace allin1 {

namespace {

using utf8::decode;
using utf8::is_space;

// ---------------------------------------------------------------------------
// Western scripts (en/es/fr): a small social-media style rule set.

enum class CharKind { space, word, punct, symbol };

CharKind western_kind(char32_t c) {
  if (is_space(c)) return CharKind::space;
  if (c < 0x80) {
    if (std::isalnum(static_cast<int>(c)) || c == '_') return CharKind::word;
    return CharKind::punct;
  }
  if ((c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || c == 0xD7 ||
      c == 0xF7)
    return CharKind::punct;
  if ((c >= 0x2010 && c <= 0x205E) || (c >= 0x20A0 && c <= 0x20CF) ||
      (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF0F) ||
      (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
      (c >= 0xFF5B && c <= 0xFF65))
    return CharKind::punct;
  // Arrows, dingbats, miscellaneous symbols and emoji: one token per code point.
  if ((c >= 0x2190 && c <= 0x2BFF) || (c >= 0x1F000 && c <= 0x1FAFF) || c == 0xFE0F)
    return CharKind::symbol;
  return CharKind::word;
}

constexpr std::array<std::string_view, 24> kEmoticons = {
    ":)",  ":-)", ":(",  ":-(", ";)",  ";-)", ":D",  ":-D", ":P",  ":-P", ":p",  ":-p",
    ":/",  ":-/", ":'(", ":o",  ":O",  "<3",  "</3", "^_^", "xD",  "XD",  ":|",  ";D"};

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

bool url_start(std::string_view rest) {
  return starts_with_ci(rest, "http://") || starts_with_ci(rest, "https://") ||
         starts_with_ci(rest, "www.");
}

bool is_trailing_url_punct(char c) {
  return std::string_view(".,;:!?)]}'\"").find(c) != std::string_view::npos;
}

class ChunkScanner {
 public:
  ChunkScanner(std::string_view chunk, std::vector<std::string>& out) : s_(chunk), out_(out) {}

  void run() {
    std::size_t pos = 0;
    while (pos < s_.size()) pos = scan_token(pos);
  }

 private:
  CharKind kind_at(std::size_t pos) const {
    return pos < s_.size() ? western_kind(decode(s_, pos).value) : CharKind::space;
  }
  bool digit_at(std::size_t pos) const {
    return pos < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos]));
  }
  bool handle_at(std::size_t pos) const {
    return (s_[pos] == '@' || s_[pos] == '#') && kind_at(pos + 1) == CharKind::word;
  }
  void emit(std::size_t begin, std::size_t end) {
    if (end > begin) out_.emplace_back(s_.substr(begin, end - begin));
  }

  std::size_t scan_token(std::size_t pos) {
    if (url_start(s_.substr(pos))) return scan_url(pos);
    if (handle_at(pos)) return scan_word(pos, pos + 1);
    const auto cp = decode(s_, pos);
    switch (western_kind(cp.value)) {
      case CharKind::word: return scan_word(pos, pos);
      case CharKind::symbol: emit(pos, pos + cp.length); return pos + cp.length;
      default: return scan_punct(pos);
    }
  }

  std::size_t scan_url(std::size_t pos) {
    std::size_t end = s_.size();
    while (end > pos && is_trailing_url_punct(s_[end - 1])) --end;
    emit(pos, end);
    emit(end, s_.size());
    return s_.size();
  }

  // Letters/digits, joined by an apostrophe or hyphen between word characters,
  // or by '.'/',' between digits ("3.5", "1,000").
  std::size_t scan_word(std::size_t begin, std::size_t pos) {
    while (pos < s_.size()) {
      const auto cp = decode(s_, pos);
      if (western_kind(cp.value) == CharKind::word) {
        pos += cp.length;
        continue;
      }
      const std::size_t next = pos + cp.length;
      const bool joiner = cp.value == '\'' || cp.value == 0x2019 || cp.value == '-';
      const bool numeric_sep = (cp.value == '.' || cp.value == ',') && pos > begin &&
                               digit_at(pos - 1) && digit_at(next);
      if ((joiner && kind_at(next) == CharKind::word && !url_start(s_.substr(next))) ||
          numeric_sep) {
        pos = next;
        continue;
      }
      break;
    }
    emit(begin, pos);
    return pos;
  }

  std::size_t scan_punct(std::size_t begin) {
    std::size_t pos = begin;
    while (pos < s_.size()) {
      const auto cp = decode(s_, pos);
      if (western_kind(cp.value) != CharKind::punct || (pos > begin && handle_at(pos))) break;
      pos += cp.length;
    }
    emit(begin, pos);
    return pos;
  }

  std::string_view s_;
  std::vector<std::string>& out_;
};

std::vector<std::string_view> whitespace_chunks(std::string_view text) {
  std::vector<std::string_view> chunks;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < text.size()) {
    const auto cp = decode(text, pos);
    if (is_space(cp.value)) {
      if (start != std::string_view::npos) chunks.push_back(text.substr(start, pos - start));
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += cp.length;
  }
  if (start != std::string_view::npos) chunks.push_back(text.substr(start));
  return chunks;
}

std::vector<std::string> tokenize_western(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string_view chunk : whitespace_chunks(text)) {
    if (std::find(kEmoticons.begin(), kEmoticons.end(), chunk) != kEmoticons.end()) {
      tokens.emplace_back(chunk);
      continue;
    }
    ChunkScanner(chunk, tokens).run();
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Japanese: whitespace passthrough for pre-segmented input, otherwise a
// boundary at every script transition.

enum class Script { space, kanji, hiragana, katakana, latin, digit, punct, other };

Script script_of(char32_t c) {
  if (is_space(c)) return Script::space;
  if (c < 0x80) {
    if (std::isalpha(static_cast<int>(c))) return Script::latin;
    if (std::isdigit(static_cast<int>(c))) return Script::digit;
    return Script::punct;
  }
  if ((c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
      (c >= 0xF900 && c <= 0xFAFF) || c == 0x3005 || c == 0x3006 || c == 0x3007)
    return Script::kanji;
  if (c >= 0x3040 && c <= 0x309F) return Script::hiragana;
  if ((c >= 0x30A0 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF) ||
      (c >= 0xFF66 && c <= 0xFF9F))
    return Script::katakana;
  if ((c >= 0xFF21 && c <= 0xFF3A) || (c >= 0xFF41 && c <= 0xFF5A) ||
      (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7))
    return Script::latin;
  if (c >= 0xFF10 && c <= 0xFF19) return Script::digit;
  if ((c >= 0xA1 && c <= 0xBF) || (c >= 0x2010 && c <= 0x205E) ||
      (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF65))
    return Script::punct;
  return Script::other;
}

std::vector<std::string> segment_japanese(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  Script current = Script::space;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto cp = decode(text, pos);
    const Script script = script_of(cp.value);
    if (script != current) {
      if (current != Script::space) tokens.emplace_back(text.substr(start, pos - start));
      start = pos;
      current = script;
    }
    pos += cp.length;
  }
  if (current != Script::space && pos > start) tokens.emplace_back(text.substr(start));
  return tokens;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, Language language) {
  switch (language) {
    case Language::en:
    case Language::es:
    case Language::fr: return tokenize_western(text);
    case Language::jp:
      if (text.find(' ') != std::string_view::npos) {
        std::vector<std::string> tokens;
        for (std::string_view chunk : whitespace_chunks(text)) tokens.emplace_back(chunk);
        return tokens;
      }
      return segment_japanese(text);
  }
  throw UsageError("unsupported language");
}

}  // namespace allin1
