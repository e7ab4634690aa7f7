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

#include "agents/cache.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

#include "common/digest.hpp"
#include "common/error.hpp"

namespace memeanno::agents {

std::string CacheKey::digest() const {
  return sha256_hex(agent_name + '\x1f' + model_id + '\x1f' + prompt_hash + '\x1f' + meme_id);
}

namespace {

OrderedJson journal_line(const std::string& digest, const CacheKey& key, const AgentResponse& r) {
  OrderedJson j;
  j["key"] = digest;
  j["agent_name"] = key.agent_name;
  j["model_id"] = key.model_id;
  j["prompt_hash"] = key.prompt_hash;
  j["meme_id"] = key.meme_id;
  j["response"] = to_json(r);
  return j;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path journal) : path_(std::move(journal)) {
  if (std::filesystem::exists(path_)) {
    for (const auto& [line, obj] : read_jsonl(path_, /*tolerate_torn_tail=*/true)) {
      CacheKey key{obj.at("agent_name").get<std::string>(), obj.at("model_id").get<std::string>(),
                   obj.at("prompt_hash").get<std::string>(), obj.at("meme_id").get<std::string>()};
      const std::string digest = key.digest();
      if (obj.value("key", std::string()) != digest) {
        fail(ErrorKind::Schema, path_.string() + ":" + std::to_string(line) + ": cache key digest mismatch");
      }
      entries_.insert_or_assign(digest, Entry{std::move(key), response_from_json(obj.at("response"))});
      ++journal_lines_;
    }
  }
  // Compact when stale lines dominate.
  if (journal_lines_ > 64 && journal_lines_ > 2 * entries_.size()) compact();
  log_ = AppendLog(path_);
}

std::optional<AgentResponse> ResponseCache::lookup(const CacheKey& key) const {
  const std::string digest = key.digest();
  std::shared_lock lock(mu_);
  const auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second.response;
}

void ResponseCache::store(const CacheKey& key, const AgentResponse& response) {
  const std::string digest = key.digest();
  const std::string line = dump_line(journal_line(digest, key, response));
  std::unique_lock lock(mu_);
  log_.append_line(line);
  ++journal_lines_;
  entries_.insert_or_assign(digest, Entry{key, response});
}

void ResponseCache::compact() {
  std::unique_lock lock(mu_);
  std::vector<const std::pair<const std::string, Entry>*> sorted;
  sorted.reserve(entries_.size());
  for (const auto& kv : entries_) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  std::string out;
  for (const auto* kv : sorted) {
    out += dump_line(journal_line(kv->first, kv->second.key, kv->second.response));
    out += '\n';
  }
  const bool reopen = log_.is_open();
  log_ = AppendLog();
  write_file_atomic(path_, out);
  journal_lines_ = entries_.size();
  if (reopen) log_ = AppendLog(path_);
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t ResponseCache::journal_lines() const {
  std::shared_lock lock(mu_);
  return journal_lines_;
}

}  // namespace memeanno::agents
