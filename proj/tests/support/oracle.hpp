// Test-only brute-force oracle for classification metrics. Works directly on
// (truth, prediction) records with plain counting loops; deliberately shares
// no code with the library's confusion-matrix path.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Record = std::pair<std::string, std::string>;  // (truth, predicted-or-NONE)

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// classes: the label vocabulary in order. "NONE" predictions match no class.
inline Metrics compute(const std::vector<Record>& records,
                       const std::vector<std::string>& classes) {
  Metrics m;
  std::size_t correct = 0;
  for (const auto& [truth, pred] : records)
    if (truth == pred) ++correct;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(records.size());

  double p_sum = 0, r_sum = 0, f_sum = 0;
  std::size_t with_support = 0;
  for (const auto& cls : classes) {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    for (const auto& [truth, pred] : records) {
      if (truth == cls) ++support;
      if (truth == cls && pred == cls) ++tp;
      if (truth != cls && pred == cls) ++fp;
      if (truth == cls && pred != cls) ++fn;
    }
    if (support == 0) continue;
    ++with_support;
    double precision = (tp + fp) == 0 ? 0.0 : double(tp) / double(tp + fp);
    double recall = (tp + fn) == 0 ? 0.0 : double(tp) / double(tp + fn);
    double f1 = (precision + recall) == 0.0
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    p_sum += precision;
    r_sum += recall;
    f_sum += f1;
  }
  if (with_support > 0) {
    m.macro_precision = p_sum / double(with_support);
    m.macro_recall = r_sum / double(with_support);
    m.macro_f1 = f_sum / double(with_support);
  }
  return m;
}

// Seeded random record sets over up to 8 classes, n <= 200, with NONE
// predictions mixed in.
struct RandomSet {
  std::vector<std::string> classes;
  std::vector<Record> records;
};

inline RandomSet random_set(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const std::vector<std::string> pool = {"HCM", "CA",  "CS",     "MYO",
                                                "ICM", "DCM", "NORMAL", "OTHER"};
  RandomSet set;
  std::size_t k = 2 + rng() % 7;  // 2..8 classes
  set.classes.assign(pool.begin(), pool.begin() + k);

  std::size_t n = 1 + rng() % 200;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& truth = set.classes[rng() % k];
    std::string pred;
    std::uint64_t roll = rng() % 100;
    if (roll < 10) {
      pred = "NONE";
    } else if (roll < 35) {
      pred = set.classes[rng() % k];  // possibly wrong
    } else {
      pred = truth;
    }
    set.records.emplace_back(truth, pred);
  }
  return set;
}

}  // namespace oracle
