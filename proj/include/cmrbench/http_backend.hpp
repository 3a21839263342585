#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "cmrbench/backend.hpp"
#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"

namespace cmrbench {

inline constexpr const char* kDefaultEndpoint = "http://localhost:11434";

struct HttpBackendOptions {
  std::string endpoint = kDefaultEndpoint;
  int max_retries = 2;
  double retry_backoff_secs = 1.0;  // fixed, non-exponential
};

// Ollama-compatible client: POST /api/generate for completions, GET /api/tags
// for the model listing. Transport failures and 5xx responses are retried with
// fixed backoff; 4xx responses are not.
class OllamaBackend : public Backend {
 public:
  explicit OllamaBackend(HttpBackendOptions options = {}) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ConfigError("endpoint must be non-empty");
    if (options_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  }

  const std::string& endpoint() const { return options_.endpoint; }

  GenerationResult generate(const GenerationRequest& request) override {
    if (request.prompt.empty()) throw ConfigError("prompt must be non-empty");
    if (request.timeout_secs <= 0) throw ConfigError("timeout must be > 0");

    nlohmann::json body = {{"model", request.model_ref},
                           {"prompt", request.prompt},
                           {"stream", false},
                           {"options", {{"temperature", request.temperature}}}};
    if (request.max_tokens) body["options"]["num_predict"] = *request.max_tokens;
    const std::string payload = body.dump();

    std::string last_error;
    const int max_attempts = 1 + options_.max_retries;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      if (attempt > 1 && options_.retry_backoff_secs > 0)
        std::this_thread::sleep_for(
            std::chrono::duration<double>(options_.retry_backoff_secs));

      auto client = make_client(request.timeout_secs);
      auto start = std::chrono::steady_clock::now();
      httplib::Result res = client->Post("/api/generate", payload, "application/json");
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;  // transport failure (includes per-attempt timeout)
      }
      if (res->status >= 500) {
        last_error = "server error status " + std::to_string(res->status);
        continue;
      }
      if (res->status == 404)
        throw ModelNotFoundError("model not found: " + request.model_ref + " (" +
                                 server_error_text(res->body) + ")");
      if (res->status != 200)
        throw Error("generate failed with status " + std::to_string(res->status) + ": " +
                    server_error_text(res->body));

      nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
      if (doc.is_discarded() || !doc.contains("response"))
        throw Error("malformed generate response from " + options_.endpoint);

      GenerationResult result;
      result.text = doc["response"].get<std::string>();
      result.wall_latency_secs = elapsed;
      if (doc.contains("total_duration") && doc["total_duration"].is_number())
        result.server_reported_secs = doc["total_duration"].get<double>() / 1e9;
      result.attempts = attempt;
      {
        std::lock_guard lock(mu_);
        ++calls_[request.model_ref];
      }
      return result;
    }
    throw TransportError("generate to " + options_.endpoint + " failed after " +
                             std::to_string(max_attempts) + " attempt(s): " + last_error,
                         max_attempts);
  }

  HealthStatus health_check(const std::string& model_ref = "") override {
    auto client = make_client(10.0);
    httplib::Result res = client->Get("/api/tags");
    if (!res)
      return HealthStatus::bad("transport: " + httplib::to_string(res.error()) + " (" +
                               options_.endpoint + ")");
    if (res->status != 200)
      return HealthStatus::bad("status " + std::to_string(res->status) + " (" +
                               options_.endpoint + ")");
    if (model_ref.empty()) return HealthStatus::ok();

    for (const auto& name : parse_model_names(res->body)) {
      if (name == model_ref || detail::starts_with(name, model_ref + ":"))
        return HealthStatus::ok();
    }
    return HealthStatus::bad("model-missing: " + model_ref);
  }

  std::vector<std::string> list_models() override {
    auto client = make_client(10.0);
    httplib::Result res = client->Get("/api/tags");
    if (!res)
      throw TransportError("model listing from " + options_.endpoint + " failed: " +
                               httplib::to_string(res.error()),
                           1);
    if (res->status != 200)
      throw Error("model listing failed with status " + std::to_string(res->status));
    return parse_model_names(res->body);
  }

  const char* kind() const override { return "http"; }

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
  std::unique_ptr<httplib::Client> make_client(double timeout_secs) const {
    auto client = std::make_unique<httplib::Client>(options_.endpoint);
    auto usec = static_cast<time_t>(std::llround(timeout_secs * 1e6));
    client->set_connection_timeout(0, usec > 0 ? usec : 1);
    client->set_read_timeout(usec / 1000000, usec % 1000000);
    client->set_write_timeout(usec / 1000000, usec % 1000000);
    return client;
  }

  static std::vector<std::string> parse_model_names(const std::string& body) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("models") || !doc["models"].is_array())
      throw Error("malformed model listing response");
    std::vector<std::string> names;
    for (const auto& item : doc["models"])
      names.push_back(item.at("name").get<std::string>());
    return names;
  }

  static std::string server_error_text(const std::string& body) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (!doc.is_discarded() && doc.contains("error") && doc["error"].is_string())
      return doc["error"].get<std::string>();
    return body.substr(0, 200);
  }

  HttpBackendOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> calls_;
};

}  // namespace cmrbench
