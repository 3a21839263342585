#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cmrbench/backend.hpp"
#include "cmrbench/classify.hpp"
#include "cmrbench/config.hpp"
#include "cmrbench/corpus.hpp"
#include "cmrbench/detail/hash.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/http_backend.hpp"
#include "cmrbench/language.hpp"
#include "cmrbench/metrics.hpp"
#include "cmrbench/mock_backend.hpp"
#include "cmrbench/prompt.hpp"
#include "cmrbench/section_split.hpp"
#include "cmrbench/synthetic.hpp"
#include "cmrbench/translate.hpp"
#include "cmrbench/validate.hpp"
#include "cmrbench/version.hpp"

namespace cmrbench {

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string created_at;
  std::string finished_at;
  nlohmann::json config;
  std::string template_id;
  std::string template_hash;
  std::string label_set_hash;
  std::string corpus_hash;
  std::string config_hash;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    return {{"tool_version", tool_version}, {"created_at", created_at},
            {"finished_at", finished_at},   {"config", config},
            {"template_id", template_id},   {"template_hash", template_hash},
            {"label_set_hash", label_set_hash}, {"corpus_hash", corpus_hash},
            {"config_hash", config_hash},   {"warnings", warnings}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.tool_version = j.value("tool_version", std::string{});
    m.created_at = j.value("created_at", std::string{});
    m.finished_at = j.value("finished_at", std::string{});
    m.config = j.at("config");
    m.template_id = j.value("template_id", std::string{});
    m.template_hash = j.value("template_hash", std::string{});
    m.label_set_hash = j.value("label_set_hash", std::string{});
    m.corpus_hash = j.value("corpus_hash", std::string{});
    m.config_hash = j.value("config_hash", std::string{});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  }
};

struct RunResult {
  RunManifest manifest;
  std::map<std::string, std::vector<Prediction>> predictions;  // by model_ref
  std::vector<ModelOutcome> outcomes;                          // config model order
  std::vector<std::string> ranking;
  std::map<std::string, std::size_t> aborted;  // transport-aborted cells per model
  std::vector<double> translation_latencies;
  bool had_transport_failures = false;
};

namespace detail {

inline std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string hex64(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

inline std::string sanitize_model_ref(const std::string& ref) {
  std::string out;
  for (char c : ref) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

inline std::string format_double(double value, int precision = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

}  // namespace detail

inline std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  if (config.mock) {
    if (config.mock_profile.empty()) return std::make_unique<MockBackend>();
    return std::make_unique<MockBackend>(MockBackend::load_profiles(config.mock_profile));
  }
  HttpBackendOptions options;
  options.endpoint = config.endpoint;
  options.max_retries = config.max_retries;
  return std::make_unique<OllamaBackend>(options);
}

// Fingerprint of everything that determines run output (not transport details
// such as endpoint, timeout, or retry budget).
inline std::string compute_config_hash(const RunConfig& config, const LabelSet& labels,
                                       const PromptTemplate& tpl) {
  nlohmann::json key = {
      {"models", config.model_refs},
      {"translate", config.translate},
      {"translation_model", config.translate ? config.translation_model : ""},
      {"seed", config.seed},
      {"include_quantitative", config.include_quantitative},
      {"averaging", to_string(config.averaging)},
      {"split", config.split.to_json()},
      {"mock", config.mock},
  };
  std::uint64_t h = detail::fnv1a64(key.dump());
  h = detail::fnv1a64(read_file(config.corpus_path), h);
  if (config.mock && !config.mock_profile.empty())
    h = detail::fnv1a64(read_file(config.mock_profile), h);
  h ^= template_fingerprint(tpl);
  h ^= label_set_fingerprint(labels);
  return detail::hex64(h);
}

// Deterministic artifact renderers. summary.json carries metric content only;
// wall-clock timing lives in timing.json so that reruns with identical inputs
// produce identical summary bytes.
inline nlohmann::json summary_to_json(const std::vector<ModelOutcome>& outcomes,
                                      const std::vector<std::string>& ranking,
                                      const std::map<std::string, std::size_t>& aborted) {
  nlohmann::json models = nlohmann::json::object();
  for (const auto& outcome : outcomes) models[outcome.metrics.model_ref] = outcome.metrics;
  nlohmann::json aborted_json = nlohmann::json::object();
  for (const auto& [model, count] : aborted)
    if (count > 0) aborted_json[model] = count;
  return {{"models", models}, {"ranking", ranking}, {"aborted", aborted_json}};
}

inline nlohmann::json timing_to_json(const std::vector<ModelOutcome>& outcomes,
                                     const std::vector<double>& translation_latencies) {
  nlohmann::json models = nlohmann::json::object();
  for (const auto& outcome : outcomes) models[outcome.timing.model_ref] = outcome.timing;
  nlohmann::json j = {{"models", models}};
  if (!translation_latencies.empty()) {
    double sum = 0;
    for (double v : translation_latencies) sum += v;
    j["translation"] = {{"requests", translation_latencies.size()},
                        {"mean_seconds", sum / translation_latencies.size()}};
  }
  return j;
}

inline std::string render_ranking_md(const std::vector<ModelOutcome>& outcomes,
                                     const std::vector<std::string>& ranking) {
  std::map<std::string, const ModelOutcome*> by_ref;
  for (const auto& o : outcomes) by_ref[o.metrics.model_ref] = &o;

  std::string md = "# Model ranking\n\n";
  md += "| rank | model | accuracy | precision | recall | f1 | mean score | s/case |\n";
  md += "|-----:|-------|---------:|----------:|-------:|---:|-----------:|-------:|\n";
  int rank = 0;
  for (const auto& ref : ranking) {
    const ModelOutcome& o = *by_ref.at(ref);
    md += "| " + std::to_string(++rank) + " | " + ref + " | " +
          detail::format_double(o.metrics.accuracy) + " | " +
          detail::format_double(o.metrics.macro_precision) + " | " +
          detail::format_double(o.metrics.macro_recall) + " | " +
          detail::format_double(o.metrics.macro_f1) + " | " +
          detail::format_double(mean_metric_score(o.metrics)) + " | " +
          detail::format_double(o.timing.mean_seconds_per_case) + " |\n";
  }
  return md;
}

inline std::string render_metrics_csv(const std::vector<ModelOutcome>& outcomes) {
  std::string csv =
      "model,accuracy,macro_precision,macro_recall,macro_f1,mean_seconds_per_case,n,"
      "parse_failures\n";
  for (const auto& o : outcomes) {
    csv += o.metrics.model_ref + "," + detail::format_double(o.metrics.accuracy, 6) + "," +
           detail::format_double(o.metrics.macro_precision, 6) + "," +
           detail::format_double(o.metrics.macro_recall, 6) + "," +
           detail::format_double(o.metrics.macro_f1, 6) + "," +
           detail::format_double(o.timing.mean_seconds_per_case, 6) + "," +
           std::to_string(o.metrics.n) + "," +
           std::to_string(o.metrics.parse_failure_count) + "\n";
  }
  return csv;
}

class Harness {
 public:
  explicit Harness(RunConfig config)
      : config_(std::move(config)), labels_(config_.resolve_label_set()) {
    config_.validate_for_run();
    std::set<std::string> unique(config_.model_refs.begin(), config_.model_refs.end());
    if (unique.size() != config_.model_refs.size())
      throw ConfigError("duplicate model_refs in config");
    if (!config_.template_dir.empty()) registry_.load_dir(config_.template_dir);
    template_ = registry_.get(config_.prompt_template_id);
  }

  // Runs the full pipeline. If output_dir already holds a manifest, resumes:
  // recorded (model, report) cells are skipped and the artifacts rebuilt over
  // the merged predictions.
  RunResult run() {
    RunResult result;
    auto corpus = load_corpus(config_.corpus_path, &labels_);
    auto validation = validate_corpus(corpus, labels_);
    if (!validation.passed())
      throw Error("corpus failed validation: " + detail::join(validation.problems, "; "));
    if (corpus.empty()) throw Error("corpus is empty; nothing to run");
    if (validation.unlabeled > 0)
      throw Error("corpus has " + std::to_string(validation.unlabeled) +
                  " report(s) without ground truth; a benchmark run requires labels");

    backend_ = make_backend(config_);
    for (const auto& model : config_.model_refs) {
      HealthStatus health = backend_->health_check(model);
      if (!health.healthy)
        throw Error("backend unhealthy for model " + model + ": " + health.reason);
    }
    if (config_.translate) {
      HealthStatus health = backend_->health_check(config_.translation_model);
      if (!health.healthy)
        throw Error("backend unhealthy for translation model " + config_.translation_model +
                    ": " + health.reason);
    }

    std::filesystem::create_directories(config_.output_dir);
    result.manifest = build_manifest();
    auto manifest_path = std::filesystem::path(config_.output_dir) / "manifest.json";
    std::map<std::string, std::set<std::string>> done;
    if (std::filesystem::exists(manifest_path)) {
      RunManifest existing = RunManifest::from_json(
          nlohmann::json::parse(read_file(manifest_path)));
      if (existing.config_hash != result.manifest.config_hash)
        throw ManifestMismatchError(
            "existing manifest in " + config_.output_dir +
            " was produced by a different configuration (hash " + existing.config_hash +
            " vs " + result.manifest.config_hash + "); refusing to resume");
      result.manifest.created_at = existing.created_at;
      done = load_checkpoints(result);
    }
    atomic_write_file(manifest_path, result.manifest.to_json().dump(2) + "\n");

    preprocess(corpus, result);

    if (config_.parallel_models) {
      result.manifest.warnings.push_back(
          "parallel-models enabled; per-model timing is less comparable");
      run_models_parallel(corpus, done, result);
    } else {
      for (const auto& model : config_.model_refs)
        run_one_model(model, corpus, done[model], result);
    }

    evaluate(corpus, result);
    result.manifest.finished_at = detail::iso8601_utc_now();
    write_artifacts(result);
    return result;
  }

  const LabelSet& labels() const { return labels_; }
  const PromptTemplate& prompt_template() const { return template_; }
  Backend& backend() { return *backend_; }

 private:
  RunManifest build_manifest() {
    RunManifest m;
    m.created_at = detail::iso8601_utc_now();
    m.config = config_.to_json();
    m.template_id = template_.id;
    m.template_hash = detail::hex64(template_fingerprint(template_));
    m.label_set_hash = detail::hex64(label_set_fingerprint(labels_));
    m.corpus_hash = detail::hex64(detail::fnv1a64(read_file(config_.corpus_path)));
    m.config_hash = compute_config_hash(config_, labels_, template_);
    return m;
  }

  std::map<std::string, std::set<std::string>> load_checkpoints(RunResult& result) {
    std::map<std::string, std::set<std::string>> done;
    for (const auto& model : config_.model_refs) {
      auto path = predictions_path(model);
      if (!std::filesystem::exists(path)) continue;
      for (auto& prediction : load_predictions_jsonl(path)) {
        if (prediction.model_ref != model) continue;
        done[model].insert(prediction.report_id);
        result.predictions[model].push_back(std::move(prediction));
      }
    }
    return done;
  }

  // Stages 1 and 2: split every report and translate non-English narratives
  // once, shared across models. Translation latency is recorded separately
  // from per-model classification timing.
  void preprocess(std::vector<ClinicalReport>& corpus, RunResult& result) {
    for (auto& report : corpus) {
      if (!report.sections) report.sections = split_report(report.raw_text, config_.split);
      std::string lang = report.language;
      if (lang != "de" && lang != "en") lang = detect_language(report.sections->narrative);
      if (config_.translate && lang != "en") {
        TranslationOutcome outcome = translate_narrative(
            report.sections->narrative, lang, *backend_, config_.translation_model,
            registry_.get("translate-de-en-v1"), config_.timeout_secs);
        report.sections->narrative = outcome.text;
        result.translation_latencies.push_back(outcome.latency_secs);
      }
    }
  }

  std::filesystem::path predictions_path(const std::string& model) const {
    return std::filesystem::path(config_.output_dir) /
           ("predictions_" + detail::sanitize_model_ref(model) + ".jsonl");
  }

  // Requests to a single model are strictly serialized so per-case latency is
  // uncontended.
  void run_one_model(const std::string& model, const std::vector<ClinicalReport>& corpus,
                     const std::set<std::string>& done, RunResult& result) {
    std::ofstream out(predictions_path(model), std::ios::app);
    if (!out) throw Error("cannot write " + predictions_path(model).string());

    ClassifyOptions options;
    options.include_quantitative = config_.include_quantitative;
    options.timeout_secs = config_.timeout_secs;

    for (const auto& report : corpus) {
      if (done.count(report.id)) continue;
      try {
        Prediction prediction =
            classify_report(report, *backend_, model, labels_, template_, options);
        out << nlohmann::json(prediction).dump() << "\n";
        out.flush();
        std::lock_guard lock(mu_);
        result.predictions[model].push_back(std::move(prediction));
      } catch (const TransportError& e) {
        std::lock_guard lock(mu_);
        ++result.aborted[model];
        result.had_transport_failures = true;
        result.manifest.warnings.push_back("aborted " + model + "/" + report.id + ": " +
                                           e.what());
      }
    }
  }

  void run_models_parallel(const std::vector<ClinicalReport>& corpus,
                           std::map<std::string, std::set<std::string>>& done,
                           RunResult& result) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(config_.model_refs.size());
    for (std::size_t i = 0; i < config_.model_refs.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          run_one_model(config_.model_refs[i], corpus, done[config_.model_refs[i]], result);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& worker : workers) worker.join();
    for (auto& error : errors)
      if (error) std::rethrow_exception(error);
  }

  void evaluate(const std::vector<ClinicalReport>& corpus, RunResult& result) {
    std::map<std::string, std::string> truth;
    for (const auto& report : corpus) truth[report.id] = *report.ground_truth;

    for (const auto& model : config_.model_refs) {
      const auto& predictions = result.predictions[model];
      if (predictions.empty())
        throw Error("no predictions recorded for model " + model +
                    " (all cells aborted?)");
      ConfusionMatrix cm(labels_.codes());
      for (const auto& prediction : predictions)
        cm.add(truth.at(prediction.report_id), prediction.label);
      ModelOutcome outcome;
      outcome.metrics = compute_metrics(cm, config_.averaging);
      outcome.metrics.model_ref = model;
      outcome.timing = timing_summary(predictions);
      result.outcomes.push_back(std::move(outcome));
      confusions_.emplace(model, std::move(cm));
    }
    result.ranking = rank_models(result.outcomes);
  }

  void write_artifacts(const RunResult& result) {
    std::filesystem::path dir(config_.output_dir);
    atomic_write_file(dir / "manifest.json", result.manifest.to_json().dump(2) + "\n");
    for (const auto& [model, cm] : confusions_) {
      atomic_write_file(
          dir / ("confusion_" + detail::sanitize_model_ref(model) + ".csv"), cm.to_csv());
    }
    atomic_write_file(
        dir / "summary.json",
        summary_to_json(result.outcomes, result.ranking, result.aborted).dump(2) + "\n");
    atomic_write_file(
        dir / "timing.json",
        timing_to_json(result.outcomes, result.translation_latencies).dump(2) + "\n");
    atomic_write_file(dir / "ranking.md",
                      render_ranking_md(result.outcomes, result.ranking));
  }

  RunConfig config_;
  LabelSet labels_;
  PromptRegistry registry_;
  PromptTemplate template_;
  std::unique_ptr<Backend> backend_;
  std::map<std::string, ConfusionMatrix> confusions_;
  std::mutex mu_;
};

inline RunResult run_pipeline(const RunConfig& config) { return Harness(config).run(); }

// Re-runs from a persisted manifest; recorded (model, report) cells are
// skipped. Fails when the on-disk inputs no longer match the manifest hash.
inline RunResult resume_run(const std::filesystem::path& manifest_path) {
  nlohmann::json doc = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
  if (doc.is_discarded())
    throw Error("manifest is not valid JSON: " + manifest_path.string());
  RunManifest manifest = RunManifest::from_json(doc);
  RunConfig config;
  detail::apply_config_layer(config, manifest.config);
  return run_pipeline(config);
}

}  // namespace cmrbench
