#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/text.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Ladder rungs in fixed order. synonym-normalize is a trailing qualifier
// recorded when the accepted value matched a synonym rather than a code.
enum class RepairStep {
  verbatim_json,
  think_block_strip,
  first_json_object_scan,
  synonym_normalize,
};

inline const char* to_string(RepairStep step) {
  switch (step) {
    case RepairStep::verbatim_json: return "verbatim-json";
    case RepairStep::think_block_strip: return "think-block-strip";
    case RepairStep::first_json_object_scan: return "first-json-object-scan";
    case RepairStep::synonym_normalize: return "synonym-normalize";
  }
  return "";
}

struct RepairTrace {
  std::vector<RepairStep> steps;  // attempted rungs, ladder order
  std::optional<RepairStep> succeeded_at;
};

// Result of the repair ladder. status == failed if and only if label is the
// NONE sentinel; the caller keeps the raw response for audit.
struct Extraction {
  std::string label = kNoneLabel;
  ParseStatus status = ParseStatus::failed;
  RepairTrace trace;
};

namespace detail {

// Removes <think>...</think> blocks; an unclosed block is stripped to the end.
inline std::string strip_think_blocks(std::string_view text) {
  static constexpr std::string_view open = "<think>";
  static constexpr std::string_view close = "</think>";
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t begin = text.find(open, pos);
    if (begin == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, begin - pos));
    std::size_t end = text.find(close, begin + open.size());
    if (end == std::string_view::npos) break;  // truncated block
    pos = end + close.size();
  }
  return out;
}

// First balanced {...} substring that parses as JSON and has the key at top
// level. String literals and escapes are honored while bracket matching.
inline std::optional<std::string> first_json_object_with_key(std::string_view text,
                                                             const std::string& key) {
  std::size_t start = 0;
  while ((start = text.find('{', start)) != std::string_view::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (escaped) {
        escaped = false;
        continue;
      }
      if (c == '\\') {
        escaped = in_string;
        continue;
      }
      if (c == '"') in_string = !in_string;
      if (in_string) continue;
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        end = i;
        break;
      }
    }
    if (end != std::string_view::npos) {
      std::string candidate(text.substr(start, end - start + 1));
      nlohmann::json doc = nlohmann::json::parse(candidate, nullptr, false);
      if (!doc.is_discarded() && doc.is_object() && doc.contains(key))
        return candidate;
    }
    ++start;
  }
  return std::nullopt;
}

struct LadderHit {
  std::string code;
  bool via_synonym = false;
};

// Whole-text parse: trimmed text must be a JSON object whose "diagnosis"
// value normalizes to a label.
inline std::optional<LadderHit> parse_verbatim(std::string_view text,
                                               const LabelSet& labels) {
  std::string_view trimmed = trim(text);
  if (trimmed.empty() || trimmed.front() != '{') return std::nullopt;
  nlohmann::json doc = nlohmann::json::parse(trimmed, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("diagnosis"))
    return std::nullopt;
  if (!doc["diagnosis"].is_string()) return std::nullopt;
  auto match = labels.find(doc["diagnosis"].get<std::string>());
  if (!match) return std::nullopt;
  return LadderHit{match->code, match->via_synonym};
}

}  // namespace detail

// Deterministic repair ladder, first success wins:
//   1. whole response is the JSON object             -> ok
//   2. strip <think> blocks, retry 1                 -> repaired
//   3. first balanced {...} containing "diagnosis"   -> repaired
//   4. otherwise                                     -> failed (NONE)
inline Extraction parse_prediction(const std::string& response, const LabelSet& labels) {
  Extraction result;
  auto accept = [&](const detail::LadderHit& hit, RepairStep step) {
    result.label = hit.code;
    result.status = step == RepairStep::verbatim_json ? ParseStatus::ok
                                                      : ParseStatus::repaired;
    result.trace.succeeded_at = step;
    if (hit.via_synonym) result.trace.steps.push_back(RepairStep::synonym_normalize);
  };

  result.trace.steps.push_back(RepairStep::verbatim_json);
  if (auto hit = detail::parse_verbatim(response, labels)) {
    accept(*hit, RepairStep::verbatim_json);
    return result;
  }

  result.trace.steps.push_back(RepairStep::think_block_strip);
  std::string stripped = detail::strip_think_blocks(response);
  if (auto hit = detail::parse_verbatim(stripped, labels)) {
    accept(*hit, RepairStep::think_block_strip);
    return result;
  }

  result.trace.steps.push_back(RepairStep::first_json_object_scan);
  if (auto object_text = detail::first_json_object_with_key(stripped, "diagnosis")) {
    nlohmann::json doc = nlohmann::json::parse(*object_text);
    if (doc["diagnosis"].is_string()) {
      if (auto match = labels.find(doc["diagnosis"].get<std::string>())) {
        accept({match->code, match->via_synonym}, RepairStep::first_json_object_scan);
        return result;
      }
    }
  }

  // Parse failure: label stays NONE, trace keeps the attempted rungs.
  return result;
}

}  // namespace cmrbench
