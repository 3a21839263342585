// In-process Ollama-shaped stub server for client tests: serves /api/tags and
// /api/generate with configurable behavior and request counters.
#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace testsupport {

class StubServer {
 public:
  StubServer() {
    server_.Get("/api/tags", [this](const httplib::Request&, httplib::Response& res) {
      ++tags_requests;
      nlohmann::json models = nlohmann::json::array();
      for (const auto& name : model_names)
        models.push_back({{"name", name}});
      res.set_content(nlohmann::json{{"models", models}}.dump(), "application/json");
    });
    server_.Post("/api/generate",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   int n = ++generate_requests;
                   last_body = req.body;
                   if (n <= fail_first_n) {
                     res.status = 500;
                     res.set_content(R"({"error":"overloaded"})", "application/json");
                     return;
                   }
                   nlohmann::json body = nlohmann::json::parse(req.body);
                   std::string model = body.value("model", "");
                   bool known = false;
                   for (const auto& name : model_names)
                     if (name == model) known = true;
                   if (!known) {
                     res.status = 404;
                     res.set_content(R"({"error":"model not found"})", "application/json");
                     return;
                   }
                   nlohmann::json reply = {{"response", response_text},
                                           {"done", true}};
                   if (report_duration_ns > 0) reply["total_duration"] = report_duration_ns;
                   res.set_content(reply.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::vector<std::string> model_names = {"gemma2:27b", "qwen2.5:32b"};
  std::string response_text = R"({"diagnosis": "HCM"})";
  std::int64_t report_duration_ns = 0;
  int fail_first_n = 0;  // respond 500 to this many generate calls

  std::atomic<int> tags_requests{0};
  std::atomic<int> generate_requests{0};
  std::string last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace testsupport
