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
#include <deque>
#include <functional>
#include <mutex>

namespace memeanno::agents {

// Injectable time source so retry and rate-limit behavior can be tested
// without real sleeps.
struct Clock {
  std::function<std::chrono::steady_clock::time_point()> now;
  std::function<void(std::chrono::nanoseconds)> sleep_for;

  static Clock system();
};

// Sliding-window log: at most `capacity` acquisitions in any window of
// `window` length. For a per-minute rate r >= 1 the window is 60 s and the
// capacity floor(r); for r < 1 one request per 60/r seconds.
class RateLimiter {
 public:
  RateLimiter(double per_minute, Clock clock);

  // Blocks until a request may be issued, then records it.
  void acquire();

  std::size_t capacity() const noexcept { return capacity_; }
  std::chrono::nanoseconds window() const noexcept { return window_; }

 private:
  Clock clock_;
  std::size_t capacity_;
  std::chrono::nanoseconds window_;
  std::mutex mu_;
  std::deque<std::chrono::steady_clock::time_point> issued_;
};

}  // namespace memeanno::agents
