#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Rules for splitting a raw report into its quantitative and narrative parts.
// Markers are scanned in list order; matching is case-insensitive and anchored
// at line start (leading indentation allowed).
struct SplitConfig {
  enum class Fallback { whole_text_as_narrative, last_paragraph_block };

  std::vector<std::string> markers;
  Fallback fallback = Fallback::whole_text_as_narrative;
  std::size_t min_narrative_chars = 1;

  static const char* fallback_name(Fallback f) {
    return f == Fallback::whole_text_as_narrative ? "whole-text-as-narrative"
                                                  : "last-paragraph-block";
  }

  static Fallback fallback_from_name(const std::string& name) {
    if (name == "whole-text-as-narrative") return Fallback::whole_text_as_narrative;
    if (name == "last-paragraph-block") return Fallback::last_paragraph_block;
    throw ConfigError("unknown split fallback: " + name);
  }

  static SplitConfig defaults() {
    SplitConfig c;
    c.markers = {"Beurteilung:", "Zusammenfassung:", "Befund:",
                 "Assessment:",  "Impression:",      "Conclusion:"};
    return c;
  }

  nlohmann::json to_json() const {
    return {{"markers", markers},
            {"fallback", fallback_name(fallback)},
            {"min_narrative_chars", min_narrative_chars}};
  }

  static SplitConfig from_json(const nlohmann::json& j) {
    SplitConfig c = defaults();
    if (j.contains("markers")) c.markers = j["markers"].get<std::vector<std::string>>();
    if (j.contains("fallback"))
      c.fallback = fallback_from_name(j["fallback"].get<std::string>());
    if (j.contains("min_narrative_chars"))
      c.min_narrative_chars = j["min_narrative_chars"].get<std::size_t>();
    if (c.min_narrative_chars < 1) throw ConfigError("min_narrative_chars must be >= 1");
    return c;
  }
};

namespace detail {

// First position where `marker` occurs at the start of a line (after optional
// horizontal whitespace), case-insensitively. npos if absent.
inline std::size_t find_marker_at_line_start(std::string_view text,
                                             std::string_view marker) {
  if (marker.empty()) return std::string_view::npos;
  std::size_t line_begin = 0;
  while (line_begin <= text.size()) {
    std::size_t pos = line_begin;
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos + marker.size() <= text.size() &&
        iequals(text.substr(pos, marker.size()), marker))
      return pos;
    std::size_t next = text.find('\n', line_begin);
    if (next == std::string_view::npos) break;
    line_begin = next + 1;
  }
  return std::string_view::npos;
}

}  // namespace detail

// Splits raw report text into quantitative and narrative sections. The first
// config marker found wins regardless of its position in the text; the marker
// itself is consumed. Falls back per config when no marker matches or the
// marker-split narrative is too short.
inline ReportSections split_report(std::string_view raw_text,
                                   const SplitConfig& config = SplitConfig::defaults()) {
  if (std::string_view(detail::trim(raw_text)).size() < config.min_narrative_chars)
    throw UnsplittableError("report text shorter than min_narrative_chars");

  for (const auto& marker : config.markers) {
    std::size_t pos = detail::find_marker_at_line_start(raw_text, marker);
    if (pos == std::string_view::npos) continue;
    std::string_view narrative = detail::trim(raw_text.substr(pos + marker.size()));
    if (narrative.size() < config.min_narrative_chars) break;  // fall back
    std::string_view quantitative = detail::rtrim(raw_text.substr(0, pos));
    return ReportSections{std::string(quantitative), std::string(narrative), marker};
  }

  std::string_view whole = detail::trim(raw_text);
  if (config.fallback == SplitConfig::Fallback::last_paragraph_block) {
    // Last block separated by a blank line becomes the narrative.
    std::size_t search_end = whole.size();
    while (true) {
      std::size_t nl = whole.rfind('\n', search_end == 0 ? 0 : search_end - 1);
      if (nl == std::string_view::npos || nl == 0) break;
      // Blank line: a newline whose preceding line is all whitespace.
      std::size_t prev_nl = whole.rfind('\n', nl - 1);
      std::size_t line_start = prev_nl == std::string_view::npos ? 0 : prev_nl + 1;
      bool blank = detail::trim(whole.substr(line_start, nl - line_start)).empty();
      if (blank) {
        std::string_view narrative = detail::trim(whole.substr(nl + 1));
        if (narrative.size() >= config.min_narrative_chars) {
          std::string_view quantitative = detail::rtrim(whole.substr(0, line_start));
          return ReportSections{std::string(quantitative), std::string(narrative),
                                "fallback:last-paragraph-block"};
        }
      }
      if (prev_nl == std::string_view::npos) break;
      search_end = nl;
    }
    // No usable paragraph boundary: degrade to whole text.
  }

  return ReportSections{"", std::string(whole), "fallback:whole-text-as-narrative"};
}

}  // namespace cmrbench
