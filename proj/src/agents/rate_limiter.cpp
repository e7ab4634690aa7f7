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

#include "agents/rate_limiter.hpp"

#include <cmath>
#include <thread>

#include "common/error.hpp"

namespace memeanno::agents {

Clock Clock::system() {
  return {[] { return std::chrono::steady_clock::now(); },
          [](std::chrono::nanoseconds d) { std::this_thread::sleep_for(d); }};
}

RateLimiter::RateLimiter(double per_minute, Clock clock) : clock_(std::move(clock)) {
  if (!(per_minute > 0)) fail(ErrorKind::Config, "rate limit must be positive");
  using namespace std::chrono;
  if (per_minute >= 1.0) {
    capacity_ = static_cast<std::size_t>(std::floor(per_minute));
    window_ = minutes(1);
  } else {
    capacity_ = 1;
    window_ = duration_cast<nanoseconds>(duration<double>(60.0 / per_minute));
  }
}

void RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  while (true) {
    const auto now = clock_.now();
    while (!issued_.empty() && now - issued_.front() >= window_) issued_.pop_front();
    if (issued_.size() < capacity_) {
      issued_.push_back(now);
      return;
    }
    const auto wait = issued_.front() + window_ - now;
    lock.unlock();
    clock_.sleep_for(wait);
    lock.lock();
  }
}

}  // namespace memeanno::agents
