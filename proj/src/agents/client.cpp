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

#include "agents/client.hpp"

#include <cmath>

#include "common/error.hpp"

namespace memeanno::agents {

AgentClient::AgentClient(AgentConfig config, std::shared_ptr<ResponseCache> cache,
                         std::shared_ptr<HttpTransport> transport, Clock clock,
                         std::uint64_t jitter_seed)
    : config_(std::move(config)),
      credential_(resolve_credential(config_)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      clock_(clock),
      limiter_(config_.rate_limit, clock),
      jitter_(jitter_seed) {
  if (!transport_) transport_ = make_http_transport();
}

Phase AgentClient::phase() const noexcept {
  return config_.role == Role::Annotator ? Phase::Annotation : Phase::Consolidation;
}

std::chrono::nanoseconds AgentClient::backoff(int attempt) {
  double factor;
  {
    std::lock_guard lock(jitter_mu_);
    factor = std::uniform_real_distribution<double>(0.8, 1.2)(jitter_);
  }
  const double ms = config_.backoff_initial_ms * std::ldexp(1.0, attempt - 1) * factor;
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double, std::milli>(ms));
}

InvokeResult AgentClient::invoke(const RenderedPrompt& prompt, const std::string& meme_id,
                                 bool refresh) {
  const CacheKey key{config_.name, config_.model_id, prompt.prompt_hash, meme_id};
  if (cache_ && !refresh) {
    if (auto hit = cache_->lookup(key)) return {std::move(*hit), true, 0};
  }

  InvokeResult result;
  AgentResponse& r = result.response;
  r.meme_id = meme_id;
  r.agent_name = config_.name;

  const HttpRequest request = build_request(config_, prompt, meme_id, credential_);
  const auto start = clock_.now();
  const int max_attempts = config_.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    limiter_.acquire();
    r.attempt_count = attempt;
    ++result.http_requests;
    const HttpResponse http = transport_->post(request);

    if (http.status == 200) {
      const auto text = extract_text(config_.provider, http.body);
      if (!text) {
        r.raw_text = http.body;
        r.status = ResponseStatus::ParseFailed;
        r.error = "unexpected " + std::string(token(config_.provider)) + " response shape";
        break;
      }
      r.raw_text = *text;
      try {
        r.parsed = parse_response(r.raw_text, phase());
        r.status = ResponseStatus::Ok;
        r.error.clear();
      } catch (const Error& e) {
        r.status = ResponseStatus::ParseFailed;
        r.error = e.what();
      }
      break;
    }

    r.status = ResponseStatus::TransportFailed;
    r.raw_text = http.body;
    r.error = http.status == 0 ? http.error : "HTTP " + std::to_string(http.status);
    const bool retryable = http.status == 0 || http.status == 429 || http.status >= 500;
    if (!retryable || attempt == max_attempts) break;
    clock_.sleep_for(backoff(attempt));
  }
  r.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(clock_.now() - start).count();

  if (cache_ && r.status != ResponseStatus::TransportFailed) cache_->store(key, r);
  return result;
}

}  // namespace memeanno::agents
