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

#include "mock/mock_agent.hpp"

#include <stdexcept>

#include <httplib.h>

namespace memeanno::mock {

using nlohmann::json;

MockAgentServer::MockAgentServer() : server_(std::make_unique<httplib::Server>()) {
  server_->Post("/v1/annotate", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad json"})", "application/json");
      return;
    }
    const std::string model = body.value("model", "");
    const std::string meme = body.contains("metadata") ? body["metadata"].value("meme_id", "") : "";
    MockModel behavior;
    std::size_t attempt = 0;
    {
      std::lock_guard lock(mu_);
      auto& seen = seen_[model];
      ++total_;
      ++seen.total;
      attempt = ++seen.per_meme[meme];
      seen.arrivals.push_back(std::chrono::steady_clock::now());
      seen.bodies.push_back(body);
      const auto it = models_.find(model);
      if (it == models_.end()) {
        res.status = 404;
        res.set_content(R"({"error":"unknown model"})", "application/json");
        return;
      }
      behavior = it->second;
    }
    if (behavior.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(behavior.delay_ms));
    if (behavior.fail_status != 0) {
      res.status = behavior.fail_status;
      res.set_content(R"({"error":"scripted failure"})", "application/json");
      return;
    }
    if (const auto t = behavior.transient_failures.find(meme);
        t != behavior.transient_failures.end() && attempt <= static_cast<std::size_t>(t->second)) {
      res.status = 503;
      res.set_content(R"({"error":"scripted transient failure"})", "application/json");
      return;
    }
    const auto r = behavior.replies.find(meme);
    const std::string text = r == behavior.replies.end() ? behavior.fallback : r->second;
    res.status = 200;
    res.set_content(json{{"text", text}}.dump(), "application/json");
  });
}

MockAgentServer::~MockAgentServer() { stop(); }

void MockAgentServer::set_model(const std::string& model, MockModel behavior) {
  std::lock_guard lock(mu_);
  models_[model] = std::move(behavior);
}

int MockAgentServer::start() {
  if (thread_.joinable()) return port_;
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock agent server: cannot bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockAgentServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockAgentServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/annotate";
}

std::size_t MockAgentServer::requests() const {
  std::lock_guard lock(mu_);
  return total_;
}

std::size_t MockAgentServer::requests(const std::string& model) const {
  std::lock_guard lock(mu_);
  const auto it = seen_.find(model);
  return it == seen_.end() ? 0 : it->second.total;
}

std::size_t MockAgentServer::requests(const std::string& model, const std::string& meme_id) const {
  std::lock_guard lock(mu_);
  const auto it = seen_.find(model);
  if (it == seen_.end()) return 0;
  const auto m = it->second.per_meme.find(meme_id);
  return m == it->second.per_meme.end() ? 0 : m->second;
}

std::vector<std::chrono::steady_clock::time_point> MockAgentServer::arrivals(
    const std::string& model) const {
  std::lock_guard lock(mu_);
  const auto it = seen_.find(model);
  return it == seen_.end() ? std::vector<std::chrono::steady_clock::time_point>{} : it->second.arrivals;
}

std::vector<json> MockAgentServer::bodies(const std::string& model) const {
  std::lock_guard lock(mu_);
  const auto it = seen_.find(model);
  return it == seen_.end() ? std::vector<json>{} : it->second.bodies;
}

void MockAgentServer::reset_counters() {
  std::lock_guard lock(mu_);
  seen_.clear();
  total_ = 0;
}

std::map<std::string, MockModel> parse_script(const json& script) {
  const auto text_of = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  std::map<std::string, MockModel> out;
  for (const auto& [model, spec] : script.at("models").items()) {
    MockModel m;
    if (spec.contains("replies")) {
      for (const auto& [meme, reply] : spec["replies"].items()) m.replies[meme] = text_of(reply);
    }
    if (spec.contains("fallback")) m.fallback = text_of(spec["fallback"]);
    m.fail_status = spec.value("fail_status", 0);
    m.delay_ms = spec.value("delay_ms", 0);
    if (spec.contains("transient_failures")) {
      for (const auto& [meme, n] : spec["transient_failures"].items()) m.transient_failures[meme] = n.get<int>();
    }
    out.emplace(model, std::move(m));
  }
  return out;
}

}  // namespace memeanno::mock
