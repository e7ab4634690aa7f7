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

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include "agents/cache.hpp"
#include "agents/config.hpp"
#include "agents/prompt.hpp"
#include "agents/rate_limiter.hpp"
#include "agents/response.hpp"
#include "agents/transport.hpp"

namespace memeanno::agents {

struct InvokeResult {
  AgentResponse response;
  bool cache_hit = false;
  int http_requests = 0;
};

// One remote agent: credential, rate limiter, retry policy, and an optional
// shared response cache. Safe to call invoke() from several threads.
class AgentClient {
 public:
  // Config error when the agent's credential variable is unset.
  AgentClient(AgentConfig config, std::shared_ptr<ResponseCache> cache,
              std::shared_ptr<HttpTransport> transport, Clock clock = Clock::system(),
              std::uint64_t jitter_seed = std::random_device{}());

  // Cache first; on a miss, POST with retries on transport errors, HTTP 429
  // and 5xx (exponential backoff from backoff_initial_ms, doubling, +/-20%
  // jitter). Failures come back as a response status, never as exceptions.
  // `refresh` skips the cache lookup but still stores the new result.
  InvokeResult invoke(const RenderedPrompt& prompt, const std::string& meme_id,
                      bool refresh = false);

  const AgentConfig& config() const noexcept { return config_; }
  Phase phase() const noexcept;

 private:
  std::chrono::nanoseconds backoff(int attempt);

  AgentConfig config_;
  std::string credential_;
  std::shared_ptr<ResponseCache> cache_;
  std::shared_ptr<HttpTransport> transport_;
  Clock clock_;
  RateLimiter limiter_;
  std::mutex jitter_mu_;
  std::mt19937_64 jitter_;
};

}  // namespace memeanno::agents
