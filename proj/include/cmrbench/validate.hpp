#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmrbench/labels.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Problems fail validation; warnings do not.
struct CorpusValidation {
  std::size_t total = 0;
  std::vector<std::pair<std::string, std::size_t>> per_label;  // label-set order
  std::size_t unlabeled = 0;
  std::vector<std::string> duplicate_ids;
  std::vector<std::string> problems;
  std::vector<std::string> warnings;

  bool passed() const { return problems.empty(); }
};

inline CorpusValidation validate_corpus(const std::vector<ClinicalReport>& reports,
                                        const LabelSet& labels) {
  CorpusValidation v;
  v.total = reports.size();
  std::vector<std::size_t> counts(labels.size(), 0);

  std::set<std::string> seen;
  std::set<std::string> dup;
  for (const auto& report : reports) {
    if (report.id.empty()) {
      v.problems.push_back("report with empty id");
    } else if (!seen.insert(report.id).second && dup.insert(report.id).second) {
      v.duplicate_ids.push_back(report.id);
      v.problems.push_back("duplicate id: " + report.id);
    }
    if (report.raw_text.empty())
      v.problems.push_back("report " + report.id + ": empty raw_text");
    if (report.sections && report.sections->narrative.empty())
      v.problems.push_back("report " + report.id + ": sections present but narrative empty");
    if (report.ground_truth) {
      auto idx = labels.index_of(*report.ground_truth);
      if (!idx) {
        v.problems.push_back("report " + report.id + ": ground truth \"" +
                             *report.ground_truth + "\" not in label set");
      } else {
        ++counts[*idx];
      }
    } else {
      ++v.unlabeled;
    }
  }

  for (std::size_t i = 0; i < labels.size(); ++i)
    v.per_label.emplace_back(labels.labels()[i].code, counts[i]);

  if (reports.empty()) v.warnings.push_back("corpus is empty");
  if (v.unlabeled > 0)
    v.warnings.push_back(std::to_string(v.unlabeled) + " report(s) without ground truth");
  return v;
}

}  // namespace cmrbench
