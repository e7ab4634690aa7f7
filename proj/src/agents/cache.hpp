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

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "agents/response.hpp"
#include "common/jsonl.hpp"

namespace memeanno::agents {

struct CacheKey {
  std::string agent_name;
  std::string model_id;
  std::string prompt_hash;
  std::string meme_id;

  // SHA-256 hex over the four fields joined by U+001F (unit separator).
  std::string digest() const;
};

// Persistent response store backed by an append-only JSONL journal
// ({"key", "agent_name", "model_id", "prompt_hash", "meme_id", "response"} per
// line; the last line for a key wins). Reads are concurrent, writes are
// serialized. A torn final line from a crash is ignored on open.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path journal);

  std::optional<AgentResponse> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const AgentResponse& response);

  // Rewrites the journal keeping one line per key.
  void compact();

  std::size_t size() const;
  std::size_t journal_lines() const;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  struct Entry {
    CacheKey key;
    AgentResponse response;
  };

  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
  std::size_t journal_lines_ = 0;
  AppendLog log_;
};

}  // namespace memeanno::agents
