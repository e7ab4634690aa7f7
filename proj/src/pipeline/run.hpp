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
#include <string>
#include <unordered_map>
#include <vector>

#include "agents/config.hpp"
#include "agents/response.hpp"
#include "common/jsonl.hpp"
#include "dataset/manifest.hpp"

namespace memeanno::pipeline {

// Files inside a run directory.
inline constexpr const char* kRunFile = "run.json";
inline constexpr const char* kResponsesFile = "responses.jsonl";
inline constexpr const char* kConsolidationFile = "consolidation.jsonl";
inline constexpr const char* kFailuresFile = "failures.jsonl";
inline constexpr const char* kConsolidatedLabelsFile = "labels.consolidated.jsonl";
inline constexpr const char* kCacheFile = "cache.jsonl";
inline constexpr const char* kHumanLabelsFile = "human_labels.jsonl";

enum class ConsolidationMethod { LlmConsolidator, MajorityVote, Unresolved };

std::string_view token(ConsolidationMethod method) noexcept;

struct RosterEntry {
  std::string name;
  std::string model_id;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct MemeState {
  std::string meme_id;
  // One slot per annotator, in roster order.
  std::vector<std::optional<agents::AgentResponse>> annotations;
  std::optional<agents::AgentResponse> consolidator_response;
  std::optional<dataset::HateLabel> consolidated;
  std::optional<ConsolidationMethod> method;

  bool annotated() const;
  std::vector<dataset::HateLabel> successful_labels() const;
};

struct FailureRecord {
  std::string meme_id;
  std::string agent_name;
  std::string phase;
  std::string status;
  std::string message;
};

struct RunMetadata {
  std::string run_id;
  std::string manifest_path;
  std::string manifest_digest;
  std::optional<dataset::Split> split;  // scope filter
  std::vector<RosterEntry> annotators;
  std::optional<RosterEntry> consolidator;
  std::string created_at;
  std::string updated_at;
};

enum class OpenMode {
  Create,  // fail if the directory already holds a run
  Resume,  // continue an existing run
  Force,   // discard existing run state (the response cache is kept)
};

// Directory-backed run state. run.json holds metadata and progress and is
// rewritten after each completed meme; responses.jsonl and
// consolidation.jsonl are append-only journals replayed on resume (last entry
// per key wins). Single writer: only the orchestrating thread mutates it.
class RunStore {
 public:
  // `meta.annotators` must be filled; on Resume the stored roster and manifest
  // digest must match.
  static RunStore open(const std::filesystem::path& dir, const dataset::Manifest& manifest,
                       RunMetadata meta, OpenMode mode);

  // Read-only load of an existing run (exports, review service).
  static RunStore load(const std::filesystem::path& dir, const dataset::Manifest& manifest);

  // Metadata of an existing run without touching the manifest.
  static RunMetadata read_metadata(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const RunMetadata& metadata() const noexcept { return meta_; }
  const std::vector<MemeState>& memes() const noexcept { return memes_; }
  const std::vector<FailureRecord>& failures() const noexcept { return failures_; }
  const MemeState* find(const std::string& meme_id) const;
  std::size_t index_of(const std::string& meme_id) const;

  void record_annotation(std::size_t meme_index, std::size_t annotator_index,
                         const agents::AgentResponse& response);
  void set_consolidator(const RosterEntry& consolidator);
  void record_consolidation(std::size_t meme_index, std::optional<dataset::HateLabel> label,
                            ConsolidationMethod method,
                            const std::optional<agents::AgentResponse>& consolidator_response);
  // Forget previous consolidation decisions in memory (before a fresh pass).
  void reset_consolidation();

  void save_state();
  // Rewrites consolidation.jsonl in scope order, one line per decided meme.
  void compact_consolidation();

 private:
  RunStore(std::filesystem::path dir, const dataset::Manifest& manifest, RunMetadata meta);
  void replay();
  void open_logs();

  std::filesystem::path dir_;
  RunMetadata meta_;
  std::vector<MemeState> memes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<FailureRecord> failures_;
  AppendLog responses_log_;
  AppendLog consolidation_log_;
  AppendLog failures_log_;
};

std::string utc_timestamp();

}  // namespace memeanno::pipeline
