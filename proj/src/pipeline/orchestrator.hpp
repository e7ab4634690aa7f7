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

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "agents/client.hpp"
#include "agents/config.hpp"
#include "dataset/manifest.hpp"
#include "pipeline/run.hpp"

namespace memeanno::pipeline {

struct AnnotatorBinding {
  agents::AgentClient* client = nullptr;
  const agents::PromptTemplate* prompt = nullptr;
};

struct AnnotateOptions {
  // Only the first N memes in scope are processed (partial runs).
  std::optional<std::size_t> max_memes;
  // Re-invoke pairs whose stored response failed, bypassing the cache.
  bool retry_failed = false;
  // Called on the orchestrating thread after each completed meme.
  std::function<void(std::size_t completed, std::size_t total)> on_meme;
};

struct AnnotateSummary {
  std::size_t memes = 0;    // memes in this pass
  std::size_t tasks = 0;    // (meme, agent) pairs invoked this pass
  std::size_t skipped = 0;  // pairs already answered by an earlier pass
  std::size_t cache_hits = 0;
  std::size_t http_requests = 0;
  std::size_t ok = 0;
  std::size_t parse_failed = 0;
  std::size_t transport_failed = 0;
};

// Bindings are in roster order. Per-agent workers run concurrently (up to each
// agent's max_parallel); all run-state writes happen on the calling thread.
// Per-item failures are recorded, not thrown.
AnnotateSummary annotate_all(RunStore& run, const dataset::Manifest& manifest,
                             const std::vector<AnnotatorBinding>& annotators,
                             const AnnotateOptions& options = {});

// True when every label has the same coarse value and the fine labels that
// are present agree. Writes the shared label to `out`. False for no labels.
bool unanimous(const std::vector<dataset::HateLabel>& labels, dataset::HateLabel* out);

// Strict coarse majority of `labels`; the fine label is the unique mode among
// the majority respondents' fine labels (coarse only on a tie or when none
// gave one). nullopt on a coarse tie or no labels.
std::optional<dataset::HateLabel> majority_fallback(const std::vector<dataset::HateLabel>& labels);

struct ConsolidateOptions {
  // Call the consolidator for every meme, unanimous or not.
  bool consolidate_all = false;
  std::function<void(std::size_t completed, std::size_t total)> on_meme;
};

struct ConsolidateSummary {
  std::size_t memes = 0;
  std::size_t pending = 0;  // not yet fully annotated, left undecided
  std::size_t unanimous = 0;
  std::size_t consolidator_invocations = 0;
  std::size_t llm_consolidator = 0;
  std::size_t majority_fallback = 0;
  std::size_t unresolved = 0;
  std::size_t cache_hits = 0;
  std::size_t http_requests = 0;
};

// Decides every fully annotated meme from scratch. A null consolidator means
// disagreements go straight to the majority fallback.
ConsolidateSummary consolidate_all(RunStore& run, const dataset::Manifest& manifest,
                                   const AnnotatorBinding& consolidator,
                                   const ConsolidateOptions& options = {});

}  // namespace memeanno::pipeline
