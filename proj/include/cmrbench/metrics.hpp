#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cmrbench/errors.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Counts indexed by (true label, predicted label) in LabelSet order, with a
// trailing "unparsed" column for NONE predictions. Rows index true labels
// only; there is no unparsed row.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels)
      : labels_(std::move(labels)),
        counts_(labels_.size(), std::vector<std::size_t>(labels_.size() + 1, 0)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
    if (labels_.empty()) throw Error("confusion matrix needs at least one label");
  }

  // records: (true code, predicted code or NONE).
  static ConfusionMatrix build(
      const std::vector<std::pair<std::string, std::string>>& records,
      const LabelSet& labels) {
    ConfusionMatrix cm(labels.codes());
    for (const auto& [truth, predicted] : records) cm.add(truth, predicted);
    return cm;
  }

  void add(const std::string& true_code, const std::string& predicted_code) {
    auto row = index_.find(true_code);
    if (row == index_.end()) throw Error("unknown true label: " + true_code);
    std::size_t col;
    if (predicted_code == kNoneLabel) {
      col = labels_.size();
    } else {
      auto it = index_.find(predicted_code);
      if (it == index_.end()) throw Error("unknown predicted label: " + predicted_code);
      col = it->second;
    }
    ++counts_[row->second][col];
    ++n_;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t class_count() const { return labels_.size(); }
  std::size_t unparsed_col() const { return labels_.size(); }
  std::size_t n() const { return n_; }

  std::size_t at(std::size_t true_i, std::size_t pred_j) const {
    return counts_.at(true_i).at(pred_j);
  }

  std::size_t row_sum(std::size_t i) const {
    std::size_t sum = 0;
    for (std::size_t j = 0; j <= labels_.size(); ++j) sum += counts_[i][j];
    return sum;
  }

  std::size_t col_sum(std::size_t j) const {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) sum += counts_[i][j];
    return sum;
  }

  std::size_t trace() const {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) sum += counts_[i][i];
    return sum;
  }

  std::size_t unparsed_total() const { return col_sum(labels_.size()); }

  // Header row/column of label codes plus "unparsed"; byte-stable.
  std::string to_csv() const {
    std::string out = "true_label";
    for (const auto& code : labels_) out += "," + code;
    out += ",unparsed\n";
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      out += labels_[i];
      for (std::size_t j = 0; j <= labels_.size(); ++j)
        out += "," + std::to_string(counts_[i][j]);
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> counts_;
  std::size_t n_ = 0;
};

enum class Averaging { macro, micro };

inline const char* to_string(Averaging a) {
  return a == Averaging::macro ? "macro" : "micro";
}

struct PerClassMetrics {
  std::string code;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsSummary {
  std::string model_ref;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<PerClassMetrics> per_class;
  std::size_t n = 0;
  std::size_t parse_failure_count = 0;
  Averaging averaging = Averaging::macro;
};

// Per class: precision = TP/(TP+FP), recall = TP/(TP+FN), zero when the
// denominator is zero. Unparsed predictions are FN for the true class and FP
// for no class. Averages run over classes with support > 0.
inline MetricsSummary compute_metrics(const ConfusionMatrix& cm,
                                      Averaging averaging = Averaging::macro) {
  if (cm.n() == 0) throw Error("cannot compute metrics over an empty matrix");

  MetricsSummary summary;
  summary.n = cm.n();
  summary.parse_failure_count = cm.unparsed_total();
  summary.averaging = averaging;
  summary.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.n());

  std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  double precision_sum = 0.0, recall_sum = 0.0, f1_sum = 0.0;
  std::size_t supported_classes = 0;

  for (std::size_t c = 0; c < cm.class_count(); ++c) {
    std::size_t tp = cm.at(c, c);
    std::size_t fp = cm.col_sum(c) - tp;
    std::size_t fn = cm.row_sum(c) - tp;
    std::size_t support = cm.row_sum(c);

    PerClassMetrics pc;
    pc.code = cm.labels()[c];
    pc.support = support;
    pc.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    pc.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    pc.f1 = (pc.precision + pc.recall) == 0.0
                ? 0.0
                : 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall);
    summary.per_class.push_back(pc);

    if (support > 0) {
      ++supported_classes;
      precision_sum += pc.precision;
      recall_sum += pc.recall;
      f1_sum += pc.f1;
      tp_sum += tp;
      fn_sum += fn;
    }
    fp_sum += fp;  // predictions of a zero-support class still cost precision
  }

  if (averaging == Averaging::macro) {
    if (supported_classes > 0) {
      summary.macro_precision = precision_sum / supported_classes;
      summary.macro_recall = recall_sum / supported_classes;
      summary.macro_f1 = f1_sum / supported_classes;
    }
  } else {
    std::size_t predicted = tp_sum + fp_sum;
    summary.macro_precision = predicted == 0 ? 0.0 : static_cast<double>(tp_sum) / predicted;
    summary.macro_recall =
        (tp_sum + fn_sum) == 0 ? 0.0 : static_cast<double>(tp_sum) / (tp_sum + fn_sum);
    summary.macro_f1 = (summary.macro_precision + summary.macro_recall) == 0.0
                           ? 0.0
                           : 2.0 * summary.macro_precision * summary.macro_recall /
                                 (summary.macro_precision + summary.macro_recall);
  }
  return summary;
}

struct TimingStats {
  std::string model_ref;
  double mean_seconds_per_case = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

// Order statistics over wall-clock latencies. Mean is the arithmetic mean
// ("seconds per patient"); p95 uses the nearest-rank method.
inline TimingStats timing_summary(const std::vector<Prediction>& predictions) {
  if (predictions.empty()) throw Error("timing summary over empty prediction list");

  TimingStats stats;
  stats.model_ref = predictions.front().model_ref;
  std::vector<double> latencies;
  latencies.reserve(predictions.size());
  double sum = 0.0;
  for (const auto& p : predictions) {
    if (p.model_ref != stats.model_ref)
      throw Error("timing summary requires a single model; saw " + p.model_ref +
                  " and " + stats.model_ref);
    if (p.latency_secs < 0) throw Error("negative latency for report " + p.report_id);
    latencies.push_back(p.latency_secs);
    sum += p.latency_secs;
  }
  std::sort(latencies.begin(), latencies.end());

  stats.n = latencies.size();
  stats.mean_seconds_per_case = sum / static_cast<double>(stats.n);
  stats.min = latencies.front();
  stats.max = latencies.back();
  if (stats.n % 2 == 1) {
    stats.median = latencies[stats.n / 2];
  } else {
    stats.median = (latencies[stats.n / 2 - 1] + latencies[stats.n / 2]) / 2.0;
  }
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(stats.n)));
  stats.p95 = latencies[std::max<std::size_t>(rank, 1) - 1];
  return stats;
}

struct ModelOutcome {
  MetricsSummary metrics;
  TimingStats timing;
};

inline double mean_metric_score(const MetricsSummary& m) {
  return (m.accuracy + m.macro_precision + m.macro_recall + m.macro_f1) / 4.0;
}

// Descending by mean of (accuracy, precision, recall, F1); ties broken by
// lower mean seconds per case, then by model_ref.
inline std::vector<std::string> rank_models(const std::vector<ModelOutcome>& outcomes) {
  if (outcomes.empty()) throw Error("rank_models requires at least one summary");
  std::vector<const ModelOutcome*> order;
  for (const auto& o : outcomes) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(),
                   [](const ModelOutcome* a, const ModelOutcome* b) {
                     double sa = mean_metric_score(a->metrics);
                     double sb = mean_metric_score(b->metrics);
                     if (sa != sb) return sa > sb;
                     if (a->timing.mean_seconds_per_case != b->timing.mean_seconds_per_case)
                       return a->timing.mean_seconds_per_case <
                              b->timing.mean_seconds_per_case;
                     return a->metrics.model_ref < b->metrics.model_ref;
                   });
  std::vector<std::string> ranking;
  for (const auto* o : order) ranking.push_back(o->metrics.model_ref);
  return ranking;
}

inline void to_json(nlohmann::json& j, const PerClassMetrics& pc) {
  j = {{"code", pc.code},
       {"precision", pc.precision},
       {"recall", pc.recall},
       {"f1", pc.f1},
       {"support", pc.support}};
}

inline void to_json(nlohmann::json& j, const MetricsSummary& m) {
  j = {{"model_ref", m.model_ref},
       {"accuracy", m.accuracy},
       {"macro_precision", m.macro_precision},
       {"macro_recall", m.macro_recall},
       {"macro_f1", m.macro_f1},
       {"per_class", m.per_class},
       {"n", m.n},
       {"parse_failure_count", m.parse_failure_count},
       {"averaging", to_string(m.averaging)}};
}

inline void to_json(nlohmann::json& j, const TimingStats& t) {
  j = {{"model_ref", t.model_ref},
       {"mean_seconds_per_case", t.mean_seconds_per_case},
       {"median", t.median},
       {"p95", t.p95},
       {"min", t.min},
       {"max", t.max},
       {"n", t.n}};
}

inline void from_json(const nlohmann::json& j, PerClassMetrics& pc) {
  pc.code = j.at("code").get<std::string>();
  pc.precision = j.value("precision", 0.0);
  pc.recall = j.value("recall", 0.0);
  pc.f1 = j.value("f1", 0.0);
  pc.support = j.value("support", std::size_t{0});
}

inline void from_json(const nlohmann::json& j, MetricsSummary& m) {
  m.model_ref = j.value("model_ref", std::string{});
  m.accuracy = j.value("accuracy", 0.0);
  m.macro_precision = j.value("macro_precision", 0.0);
  m.macro_recall = j.value("macro_recall", 0.0);
  m.macro_f1 = j.value("macro_f1", 0.0);
  m.per_class = j.value("per_class", std::vector<PerClassMetrics>{});
  m.n = j.value("n", std::size_t{0});
  m.parse_failure_count = j.value("parse_failure_count", std::size_t{0});
  m.averaging = j.value("averaging", std::string{"macro"}) == "micro" ? Averaging::micro
                                                                      : Averaging::macro;
}

inline void from_json(const nlohmann::json& j, TimingStats& t) {
  t.model_ref = j.value("model_ref", std::string{});
  t.mean_seconds_per_case = j.value("mean_seconds_per_case", 0.0);
  t.median = j.value("median", 0.0);
  t.p95 = j.value("p95", 0.0);
  t.min = j.value("min", 0.0);
  t.max = j.value("max", 0.0);
  t.n = j.value("n", std::size_t{0});
}

}  // namespace cmrbench
