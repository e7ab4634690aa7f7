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
#include <filesystem>
#include <string>
#include <vector>

#include "agents/client.hpp"
#include "agents/config.hpp"
#include "agents/rate_limiter.hpp"
#include "dataset/labels.hpp"
#include "dataset/manifest.hpp"
#include "mock/mock_agent.hpp"
#include "pipeline/orchestrator.hpp"
#include "pipeline/run.hpp"

namespace memeanno::testing {

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// A 1x1 PNG.
const std::string& tiny_png();

// n memes "m01".."mNN" with images and text; every fourth one propagandistic.
// Written to dir/manifest.jsonl with images under dir/images.
std::filesystem::path write_synthetic_manifest(const std::filesystem::path& dir, std::size_t n,
                                               std::optional<dataset::Split> split = std::nullopt);
std::string meme_id(std::size_t index);  // 0-based -> "m01"

// Generic-provider agent pointed at a mock endpoint, with no pacing so tests
// stay fast.
agents::AgentConfig mock_agent(const std::string& name, const std::string& endpoint,
                               agents::Role role = agents::Role::Annotator);

// Agents config JSON with the given agents and the canonical templates.
std::string agents_config_json(const std::vector<agents::AgentConfig>& agents);

std::string answer(const std::string& coarse, const std::string& fine = "");

// Manual clock: sleep_for advances time instantly and records the request.
struct FakeClock {
  std::chrono::steady_clock::time_point now{};
  std::vector<std::chrono::nanoseconds> sleeps;
  agents::Clock clock();
};

// Scripted three-annotator setup used by pipeline, service and acceptance
// tests: `n` memes, the listed memes get a split vote, everything else is a
// unanimous (hateful, mocking) or (not_hateful, humor).
struct MockRoster {
  MockRoster(std::size_t n, std::vector<std::size_t> disagreeing);

  std::vector<std::string> disagreement_ids() const;
  // The consolidator always answers (hateful, contempt).
  void install(mock::MockAgentServer& server) const;

  std::size_t n;
  std::vector<std::size_t> disagreeing;
};

// Indexes of the scripted split votes among 50 memes.
extern const std::vector<std::size_t> kDisagreeing;

// n scripted memes, three annotators (alpha, beta, gamma) and a consolidator
// (judge) behind one mock server, sharing the run's response cache. Clients
// are rebuilt for every pass, like a new process.
class PipelineHarness {
 public:
  explicit PipelineHarness(std::size_t n = 50, std::optional<dataset::Split> split = std::nullopt);

  std::filesystem::path root() const { return dir_.path(); }
  std::filesystem::path run_dir() const { return dir_ / "run"; }
  const std::filesystem::path& manifest_path() const { return manifest_path_; }
  mock::MockAgentServer& server() { return server_; }
  const dataset::Manifest& manifest() const { return manifest_; }
  std::vector<agents::AgentConfig>& configs() { return configs_; }
  const agents::AgentConfig& judge_config() const { return judge_config_; }

  pipeline::RunStore open(pipeline::OpenMode mode);
  pipeline::AnnotateSummary annotate(pipeline::RunStore& run, const pipeline::AnnotateOptions& options = {});
  pipeline::ConsolidateSummary consolidate(pipeline::RunStore& run, bool with_judge = true,
                                           const pipeline::ConsolidateOptions& options = {});
  // Create, annotate and consolidate in one go.
  void complete_run();

 private:
  std::shared_ptr<agents::ResponseCache> cache();
  void reset_clients();

  TempDir dir_;
  MockRoster roster_;
  std::filesystem::path manifest_path_;
  dataset::Manifest manifest_;
  mock::MockAgentServer server_;
  std::vector<agents::AgentConfig> configs_;
  agents::AgentConfig judge_config_;
  std::vector<agents::PromptTemplate> templates_;
  std::vector<std::unique_ptr<agents::AgentClient>> clients_;
  std::unique_ptr<agents::AgentClient> judge_;
};

}  // namespace memeanno::testing
