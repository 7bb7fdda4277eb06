#pragma once

#include <array>
#include <string>
#include <string_view>

#include "allin1/error.hpp"

namespace allin1 {

enum class Language { en, es, fr, jp };

inline constexpr std::array<Language, 4> kAllLanguages = {Language::en, Language::es,
                                                          Language::fr, Language::jp};

constexpr std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::en: return "en";
    case Language::es: return "es";
    case Language::fr: return "fr";
    case Language::jp: return "jp";
  }
  return "?";
}

inline Language parse_language(std::string_view code) {
  for (Language lang : kAllLanguages)
    if (to_string(lang) == code) return lang;
  throw UsageError("unknown language code '" + std::string(code) + "' (expected en|es|fr|jp)");
}

}  // namespace allin1
