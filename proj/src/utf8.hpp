#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace allin1::utf8 {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes
};

// Decodes the code point starting at byte `pos`. Malformed sequences decode
// as U+FFFD spanning a single byte so that scanning always makes progress.
inline CodePoint decode(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  if (lead < 0x80) return {lead, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto cont = static_cast<unsigned char>(s[pos + i]);
    if ((cont & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (cont & 0x3F);
  }
  return {cp, len};
}

// Byte offsets of every code point start, plus a trailing s.size().
inline std::vector<std::size_t> boundaries(std::string_view s) {
  std::vector<std::size_t> out;
  out.reserve(s.size() + 1);
  for (std::size_t pos = 0; pos < s.size(); pos += decode(s, pos).length) out.push_back(pos);
  out.push_back(s.size());
  return out;
}

inline bool is_space(char32_t c) {
  return c == ' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

}  // namespace allin1::utf8
