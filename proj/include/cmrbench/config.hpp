#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/http_backend.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/metrics.hpp"
#include "cmrbench/section_split.hpp"

namespace cmrbench {

// Everything needed to reproduce a benchmark run. label_set is resolved from
// labels_path (built-in default when empty).
struct RunConfig {
  std::string corpus_path;
  std::vector<std::string> model_refs;
  std::string endpoint = kDefaultEndpoint;
  std::string labels_path;
  bool translate = false;
  std::string translation_model = "llama3.3";
  std::string prompt_template_id = "cmr-diagnosis-v1";
  std::string template_dir;
  std::uint64_t seed = 0;
  double timeout_secs = 120.0;
  int max_retries = 2;
  std::string output_dir;
  bool mock = false;
  std::string mock_profile;
  bool parallel_models = false;
  bool include_quantitative = false;
  Averaging averaging = Averaging::macro;
  SplitConfig split = SplitConfig::defaults();

  LabelSet resolve_label_set() const {
    return labels_path.empty() ? default_label_set() : LabelSet::load(labels_path);
  }

  void validate_for_run() const {
    if (corpus_path.empty()) throw ConfigError("corpus path is required");
    if (model_refs.empty()) throw ConfigError("at least one model is required");
    if (output_dir.empty()) throw ConfigError("output directory is required");
    if (timeout_secs <= 0) throw ConfigError("timeout must be > 0");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  }

  // Canonical JSON form; also the config-file schema.
  nlohmann::json to_json() const {
    return {{"corpus", corpus_path},
            {"models", model_refs},
            {"endpoint", endpoint},
            {"labels", labels_path},
            {"translate", translate},
            {"translation_model", translation_model},
            {"template", prompt_template_id},
            {"template_dir", template_dir},
            {"seed", seed},
            {"timeout_secs", timeout_secs},
            {"max_retries", max_retries},
            {"out", output_dir},
            {"mock", mock},
            {"mock_profile", mock_profile},
            {"parallel_models", parallel_models},
            {"include_quantitative", include_quantitative},
            {"averaging", to_string(averaging)},
            {"split", split.to_json()}};
  }
};

namespace detail {

// Applies one JSON layer onto a config in place. Unknown keys are errors so
// config-file typos surface immediately.
inline void apply_config_layer(RunConfig& config, const nlohmann::json& layer) {
  if (!layer.is_object()) throw ConfigError("config layer must be a JSON object");
  for (const auto& [key, value] : layer.items()) {
    if (key == "corpus") config.corpus_path = value.get<std::string>();
    else if (key == "models") {
      if (value.is_array()) config.model_refs = value.get<std::vector<std::string>>();
      else config.model_refs = split(value.get<std::string>(), ',');
    }
    else if (key == "endpoint") config.endpoint = value.get<std::string>();
    else if (key == "labels") config.labels_path = value.get<std::string>();
    else if (key == "translate") config.translate = value.get<bool>();
    else if (key == "translation_model") config.translation_model = value.get<std::string>();
    else if (key == "template") config.prompt_template_id = value.get<std::string>();
    else if (key == "template_dir") config.template_dir = value.get<std::string>();
    else if (key == "seed") config.seed = value.get<std::uint64_t>();
    else if (key == "timeout_secs") config.timeout_secs = value.get<double>();
    else if (key == "max_retries") config.max_retries = value.get<int>();
    else if (key == "out") config.output_dir = value.get<std::string>();
    else if (key == "mock") config.mock = value.get<bool>();
    else if (key == "mock_profile") config.mock_profile = value.get<std::string>();
    else if (key == "parallel_models") config.parallel_models = value.get<bool>();
    else if (key == "include_quantitative") config.include_quantitative = value.get<bool>();
    else if (key == "averaging") {
      std::string a = value.get<std::string>();
      if (a == "macro") config.averaging = Averaging::macro;
      else if (a == "micro") config.averaging = Averaging::micro;
      else throw ConfigError("averaging must be macro or micro");
    }
    else if (key == "split") config.split = SplitConfig::from_json(value);
    else throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace detail

// Precedence: flag > environment variable > config file > default. Each layer
// is a partial JSON object carrying only the keys it sets.
inline RunConfig resolve_run_config(const nlohmann::json& config_file_layer,
                                    const std::map<std::string, std::string>& env,
                                    const nlohmann::json& flag_layer) {
  RunConfig config;
  if (!config_file_layer.is_null()) detail::apply_config_layer(config, config_file_layer);
  if (auto it = env.find("HARNESS_ENDPOINT"); it != env.end() && !it->second.empty())
    config.endpoint = it->second;
  if (!flag_layer.is_null()) detail::apply_config_layer(config, flag_layer);
  return config;
}

inline nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded())
    throw ConfigError("config file is not valid JSON: " + path.string());
  return doc;
}

}  // namespace cmrbench
