// Copyright 2026 The memeanno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace memeanno::mock {

// Scripted behavior of one model behind the mock endpoint.
struct MockModel {
  // Reply text per meme id; `fallback` for memes not listed.
  std::map<std::string, std::string> replies;
  std::string fallback = R"({"coarse": "not_hateful", "fine": "humor"})";
  // Non-zero: every request is answered with this HTTP status.
  int fail_status = 0;
  // Per meme: answer the first N requests with 503 before replying.
  std::map<std::string, int> transient_failures;
  int delay_ms = 0;
};

// In-process HTTP server speaking the generic provider format: POST
// /v1/annotate with {"model", "prompt", "metadata": {"meme_id", "agent"}, ...},
// reply {"text": ...}. Requests are routed by "model" and counted.
class MockAgentServer {
 public:
  MockAgentServer();
  ~MockAgentServer();

  void set_model(const std::string& model, MockModel behavior);

  // Binds 127.0.0.1 on a free port and serves on a background thread.
  int start();
  void stop();
  int port() const noexcept { return port_; }
  std::string endpoint() const;

  std::size_t requests() const;
  std::size_t requests(const std::string& model) const;
  std::size_t requests(const std::string& model, const std::string& meme_id) const;
  std::vector<std::chrono::steady_clock::time_point> arrivals(const std::string& model) const;
  std::vector<nlohmann::json> bodies(const std::string& model) const;
  void reset_counters();

 private:
  struct Seen {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_meme;
    std::vector<std::chrono::steady_clock::time_point> arrivals;
    std::vector<nlohmann::json> bodies;
  };

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::map<std::string, MockModel> models_;
  std::map<std::string, Seen> seen_;
  std::size_t total_ = 0;
};

// {"models": {"<model>": {"replies": {...}, "fallback": "...", "fail_status": 0,
// "transient_failures": {...}, "delay_ms": 0}}}; reply values may be strings or
// JSON objects (sent as their compact dump).
std::map<std::string, MockModel> parse_script(const nlohmann::json& script);

}  // namespace memeanno::mock
