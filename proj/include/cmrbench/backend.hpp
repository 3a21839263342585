#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmrbench/errors.hpp"

namespace cmrbench {

// Single non-streaming completion request. Temperature defaults to 0 for
// reproducibility; streaming is always off.
struct GenerationRequest {
  std::string model_ref;
  std::string prompt;
  double temperature = 0.0;
  std::optional<int> max_tokens;  // unset = unlimited
  double timeout_secs = 120.0;
  bool stream = false;
};

struct GenerationResult {
  std::string text;
  double wall_latency_secs = 0.0;  // measured locally; the canonical timing
  std::optional<double> server_reported_secs;  // advisory metadata only
  int attempts = 1;
};

struct HealthStatus {
  bool healthy = true;
  std::string reason;  // empty when healthy

  static HealthStatus ok() { return {true, {}}; }
  static HealthStatus bad(std::string why) { return {false, std::move(why)}; }
};

// Common surface of the HTTP client and the in-process mock. Implementations
// are safe for concurrent requests to distinct models; the harness serializes
// requests per model during timed runs.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual GenerationResult generate(const GenerationRequest& request) = 0;

  // Probes transport and, when model_ref is non-empty, its presence in the
  // served model listing. Unhealthy is a value, not an error.
  virtual HealthStatus health_check(const std::string& model_ref = "") = 0;

  virtual std::vector<std::string> list_models() = 0;

  virtual const char* kind() const = 0;  // "http" | "mock"

  // Completed generate() calls for the given model (all models when empty).
  virtual std::uint64_t generate_calls(const std::string& model_ref = "") const = 0;
};

}  // namespace cmrbench
