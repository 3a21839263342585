#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cmrbench/backend.hpp"
#include "cmrbench/errors.hpp"

namespace cmrbench {

// Keyword-table behavior of one mock model. Answers are scanned against the
// prompt; the entry whose keyword occurs earliest wins (ties: table order).
struct MockModelProfile {
  std::vector<std::pair<std::string, std::string>> answers;  // keyword -> response
  std::string default_response = R"({"diagnosis":"OTHER"})";
  double latency_secs = 0.0;
};

// Deterministic in-process stand-in for a model server. Identical
// (answer_table, prompt) pairs yield identical text across runs and platforms.
class MockBackend : public Backend {
 public:
  // Single model named "mock" with an empty table.
  MockBackend() { models_.emplace("mock", MockModelProfile{}); }

  explicit MockBackend(std::map<std::string, MockModelProfile> models)
      : models_(std::move(models)) {
    if (models_.empty()) throw ConfigError("mock profile defines no models");
  }

  static std::map<std::string, MockModelProfile> parse_profiles(const nlohmann::json& doc) {
    std::map<std::string, MockModelProfile> models;
    if (!doc.is_object() || !doc.contains("models"))
      throw ConfigError("mock profile must contain a \"models\" object");
    for (const auto& [name, spec] : doc["models"].items()) {
      MockModelProfile profile;
      profile.latency_secs = spec.value("latency_ms", 0.0) / 1000.0;
      if (spec.contains("default"))
        profile.default_response = spec["default"].get<std::string>();
      for (const auto& entry : spec.value("answers", nlohmann::json::array())) {
        profile.answers.emplace_back(entry.at("keyword").get<std::string>(),
                                     entry.at("response").get<std::string>());
      }
      models.emplace(name, std::move(profile));
    }
    return models;
  }

  static std::map<std::string, MockModelProfile> load_profiles(
      const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock profile: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded())
      throw ConfigError("mock profile is not valid JSON: " + path.string());
    return parse_profiles(doc);
  }

  GenerationResult generate(const GenerationRequest& request) override {
    auto it = models_.find(request.model_ref);
    if (it == models_.end())
      throw ModelNotFoundError("mock backend serves no model named " + request.model_ref);
    const MockModelProfile& profile = it->second;

    auto start = std::chrono::steady_clock::now();
    if (profile.latency_secs > 0.0)
      std::this_thread::sleep_for(std::chrono::duration<double>(profile.latency_secs));

    const std::string* response = &profile.default_response;
    std::size_t best_pos = std::string::npos;
    for (const auto& [keyword, canned] : profile.answers) {
      std::size_t pos = request.prompt.find(keyword);
      if (pos != std::string::npos && pos < best_pos) {
        best_pos = pos;
        response = &canned;
      }
    }

    GenerationResult result;
    result.text = *response;
    result.wall_latency_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.attempts = 1;
    {
      std::lock_guard lock(mu_);
      ++calls_[request.model_ref];
    }
    return result;
  }

  HealthStatus health_check(const std::string& model_ref = "") override {
    if (!model_ref.empty() && !models_.count(model_ref))
      return HealthStatus::bad("model-missing: " + model_ref);
    return HealthStatus::ok();
  }

  std::vector<std::string> list_models() override {
    std::vector<std::string> out;
    for (const auto& [name, _] : models_) out.push_back(name);
    return out;
  }

  const char* kind() const override { return "mock"; }

  std::uint64_t generate_calls(const std::string& model_ref = "") const override {
    std::lock_guard lock(mu_);
    if (!model_ref.empty()) {
      auto it = calls_.find(model_ref);
      return it == calls_.end() ? 0 : it->second;
    }
    std::uint64_t total = 0;
    for (const auto& [_, n] : calls_) total += n;
    return total;
  }

 private:
  std::map<std::string, MockModelProfile> models_;
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> calls_;
};

}  // namespace cmrbench
