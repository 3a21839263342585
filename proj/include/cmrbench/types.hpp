#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "cmrbench/errors.hpp"
#include "cmrbench/labels.hpp"

namespace cmrbench {

struct ReportSections {
  std::string quantitative;  // may be empty
  std::string narrative;     // never empty
  std::string split_marker;  // marker that produced the split, or "fallback:<rule>"

  bool operator==(const ReportSections&) const = default;
};

struct ClinicalReport {
  std::string id;
  std::string language = "unknown";  // de | en | unknown
  std::string raw_text;
  std::optional<ReportSections> sections;
  std::optional<std::string> ground_truth;

  bool operator==(const ClinicalReport&) const = default;
};

enum class ParseStatus { ok, repaired, failed };

inline const char* to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::repaired: return "repaired";
    case ParseStatus::failed: return "failed";
  }
  return "failed";
}

inline ParseStatus parse_status_from_string(const std::string& s) {
  if (s == "ok") return ParseStatus::ok;
  if (s == "repaired") return ParseStatus::repaired;
  if (s == "failed") return ParseStatus::failed;
  throw Error("unknown parse status: " + s);
}

// One model's structured answer for one report. parse_status == failed
// if and only if label is the NONE sentinel.
struct Prediction {
  std::string report_id;
  std::string model_ref;
  std::string label = kNoneLabel;
  std::string raw_response;
  ParseStatus parse_status = ParseStatus::failed;
  double latency_secs = 0.0;

  bool operator==(const Prediction&) const = default;
};

inline void to_json(nlohmann::json& j, const Prediction& p) {
  j = {{"report_id", p.report_id},
       {"model_ref", p.model_ref},
       {"label", p.label},
       {"raw_response", p.raw_response},
       {"parse_status", to_string(p.parse_status)},
       {"latency_secs", p.latency_secs}};
}

inline void from_json(const nlohmann::json& j, Prediction& p) {
  p.report_id = j.at("report_id").get<std::string>();
  p.model_ref = j.at("model_ref").get<std::string>();
  p.label = j.at("label").get<std::string>();
  p.raw_response = j.value("raw_response", std::string{});
  p.parse_status = parse_status_from_string(j.at("parse_status").get<std::string>());
  p.latency_secs = j.value("latency_secs", 0.0);
}

}  // namespace cmrbench
