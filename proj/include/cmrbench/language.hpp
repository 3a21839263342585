#pragma once

#include <array>
#include <cctype>
#include <set>
#include <string>
#include <string_view>

#include "cmrbench/detail/text.hpp"

namespace cmrbench {

namespace detail {

// Disjoint function-word lists; tokens appearing in both languages are
// deliberately absent (e.g. "in", "an", "was").
inline const std::set<std::string>& german_stopwords() {
  static const std::set<std::string> words = {
      "der",   "die",  "das",   "und",   "ist",    "sind",  "mit",   "ohne",
      "kein",  "keine", "keiner", "keinem", "nicht", "bei",  "im",    "am",
      "ein",   "eine", "einer", "einem", "eines",  "des",   "dem",   "den",
      "zeigt", "sich", "auf",   "sowie", "nach",   "sowohl", "beurteilung",
      "befund", "nachweis", "unauffaellig"};
  return words;
}

inline const std::set<std::string>& english_stopwords() {
  static const std::set<std::string> words = {
      "the",  "of",    "and",  "is",    "are",   "with",    "without", "no",
      "not",  "there", "on",   "at",    "a",     "this",    "that",    "shows",
      "for",  "from",  "to",   "as",    "within", "evidence", "findings",
      "assessment", "normal"};
  return words;
}

// Umlauts and eszett in UTF-8; each occurrence counts as German evidence.
inline int german_char_evidence(std::string_view text) {
  static constexpr std::array<std::string_view, 8> marks = {
      "ä", "ö", "ü", "ß", "Ä", "Ö", "Ü", "ẞ"};
  int score = 0;
  for (auto mark : marks)
    score += static_cast<int>(count_occurrences(text, mark));
  return score;
}

}  // namespace detail

// Lightweight lexical heuristic: "de" or "en" when one language's stop-word
// and character evidence dominates, "unknown" otherwise. Deterministic; no
// model call.
inline std::string detect_language(std::string_view text) {
  int de = detail::german_char_evidence(text);
  int en = 0;

  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (detail::german_stopwords().count(token)) ++de;
    if (detail::english_stopwords().count(token)) ++en;
    token.clear();
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalpha(c) || c >= 0x80) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();

  if (de > en) return "de";
  if (en > de) return "en";
  return "unknown";
}

}  // namespace cmrbench
