#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Writes content to a temp file in the target directory, then renames into
// place. Readers never observe a partial file. The hook runs between write
// and rename (used by interleaving tests).
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content,
                              const std::function<void()>& pre_rename_hook = {}) {
  auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(
                       std::hash<std::string>{}(path.string()) % 100000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  if (pre_rename_hook) pre_rename_hook();
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

namespace detail {

inline nlohmann::json report_to_json(const ClinicalReport& report) {
  nlohmann::json j = {{"id", report.id},
                      {"language", report.language},
                      {"raw_text", report.raw_text}};
  if (report.ground_truth) j["ground_truth"] = *report.ground_truth;
  if (report.sections) {
    j["sections"] = {{"quantitative", report.sections->quantitative},
                     {"narrative", report.sections->narrative},
                     {"split_marker", report.sections->split_marker}};
  }
  return j;
}

inline ClinicalReport report_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw CorpusFormatError("expected a JSON object", line);
  ClinicalReport report;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    throw CorpusFormatError("missing or empty \"id\"", line);
  report.id = j["id"].get<std::string>();
  if (!j.contains("raw_text") || !j["raw_text"].is_string())
    throw CorpusFormatError("missing \"raw_text\"", line);
  report.raw_text = j["raw_text"].get<std::string>();
  if (report.raw_text.empty()) throw CorpusFormatError("empty \"raw_text\"", line);
  report.language = j.value("language", std::string{"unknown"});
  if (j.contains("ground_truth") && !j["ground_truth"].is_null())
    report.ground_truth = j["ground_truth"].get<std::string>();
  if (j.contains("sections")) {
    const auto& s = j["sections"];
    report.sections = ReportSections{s.value("quantitative", std::string{}),
                                     s.at("narrative").get<std::string>(),
                                     s.value("split_marker", std::string{})};
  }
  return report;
}

}  // namespace detail

// JSONL, one report per line. Blank lines are skipped. When a label set is
// given, ground-truth codes outside it are rejected with their line number.
inline std::vector<ClinicalReport> load_corpus(const std::filesystem::path& path,
                                               const LabelSet* labels = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus: " + path.string());

  std::vector<ClinicalReport> reports;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw CorpusFormatError("not valid JSON", line_no);
    ClinicalReport report = detail::report_from_json(j, line_no);
    if (!seen.insert(report.id).second)
      throw CorpusFormatError("duplicate id \"" + report.id + "\"", line_no);
    if (labels && report.ground_truth && !labels->contains(*report.ground_truth))
      throw CorpusFormatError(
          "unknown ground truth code \"" + *report.ground_truth + "\"", line_no);
    reports.push_back(std::move(report));
  }
  return reports;
}

inline std::string corpus_to_jsonl(const std::vector<ClinicalReport>& reports) {
  std::string out;
  for (const auto& report : reports) {
    out += detail::report_to_json(report).dump();
    out += '\n';
  }
  return out;
}

inline void save_corpus(const std::filesystem::path& path,
                        const std::vector<ClinicalReport>& reports) {
  atomic_write_file(path, corpus_to_jsonl(reports));
}

// Tolerant loader for prediction checkpoints: a truncated trailing line (from
// an interrupted run) is dropped rather than rejected.
inline std::vector<Prediction> load_predictions_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions: " + path.string());
  std::vector<Prediction> predictions;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) break;
    try {
      predictions.push_back(j.get<Prediction>());
    } catch (const nlohmann::json::exception&) {
      break;
    }
  }
  return predictions;
}

}  // namespace cmrbench
