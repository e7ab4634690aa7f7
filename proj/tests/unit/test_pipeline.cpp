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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "agents/client.hpp"
#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "dataset/label_file.hpp"
#include "mock/mock_agent.hpp"
#include "pipeline/export.hpp"
#include "pipeline/orchestrator.hpp"
#include "pipeline/run.hpp"
#include "test_support.hpp"

namespace memeanno::pipeline {
namespace {

namespace fs = std::filesystem;
using dataset::CoarseLabel;
using dataset::FineLabel;
using dataset::HateLabel;
using testing::answer;

using testing::kDisagreeing;

std::size_t line_count(const fs::path& p) {
  if (!fs::exists(p)) return 0;
  const auto text = testing::read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

using Harness = testing::PipelineHarness;

TEST(Pipeline, AnnotatesEveryPairOnce) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  std::size_t progress_calls = 0;
  AnnotateOptions opts;
  opts.on_meme = [&](std::size_t done, std::size_t total) {
    ++progress_calls;
    EXPECT_EQ(total, 50u);
    EXPECT_LE(done, total);
  };
  const auto s = h.annotate(run, opts);
  EXPECT_EQ(s.memes, 50u);
  EXPECT_EQ(s.tasks, 150u);
  EXPECT_EQ(s.ok, 150u);
  EXPECT_EQ(progress_calls, 50u);
  EXPECT_EQ(line_count(h.run_dir() / kResponsesFile), 150u);
  EXPECT_EQ(h.server().requests(), 150u);
  for (const auto& m : run.memes()) {
    EXPECT_TRUE(m.annotated());
    EXPECT_EQ(m.successful_labels().size(), 3u);
  }
  EXPECT_EQ(run.memes()[0].annotations[0]->parsed, HateLabel(CoarseLabel::Hateful, FineLabel::Mocking));
  EXPECT_EQ(run.memes()[1].annotations[2]->parsed, HateLabel(CoarseLabel::NotHateful, FineLabel::Humor));
}

TEST(Pipeline, ResumeInvokesOnlyTheRemainingPairs) {
  Harness h;
  {
    auto run = h.open(OpenMode::Create);
    AnnotateOptions opts;
    opts.max_memes = 25;
    const auto s = h.annotate(run, opts);
    EXPECT_EQ(s.tasks, 75u);
  }
  EXPECT_EQ(h.server().requests(), 75u);
  const auto state = Json::parse(testing::read_file(h.run_dir() / kRunFile));
  EXPECT_EQ(state["progress"]["annotated"], 25);

  auto run = h.open(OpenMode::Resume);
  const auto s = h.annotate(run);
  EXPECT_EQ(s.skipped, 75u);
  EXPECT_EQ(s.tasks, 75u);
  EXPECT_EQ(h.server().requests(), 150u);
  for (const char* model : {"alpha-model", "beta-model", "gamma-model"}) {
    for (std::size_t i = 0; i < 50; ++i) {
      EXPECT_EQ(h.server().requests(model, testing::meme_id(i)), 1u) << model << i;
    }
  }
  EXPECT_EQ(line_count(h.run_dir() / kResponsesFile), 150u);
}

TEST(Pipeline, OpenModes) {
  Harness h;
  { auto run = h.open(OpenMode::Create); }
  try {
    h.open(OpenMode::Create);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Argument);
  }
  h.configs().pop_back();
  try {
    h.open(OpenMode::Resume);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  auto forced = h.open(OpenMode::Force);
  EXPECT_EQ(forced.metadata().annotators.size(), 2u);
}

TEST(Pipeline, ForcedRerunIsServedFromTheCache) {
  Harness h;
  {
    auto run = h.open(OpenMode::Create);
    h.annotate(run);
  }
  auto run = h.open(OpenMode::Force);
  const auto s = h.annotate(run);
  EXPECT_EQ(s.cache_hits, 150u);
  EXPECT_EQ(s.http_requests, 0u);
  EXPECT_EQ(h.server().requests(), 150u);
}

TEST(Pipeline, UnreachableAgentFailsOnlyItsOwnPairs) {
  Harness h;
  mock::MockModel down;
  down.fail_status = 500;
  h.server().set_model("gamma-model", down);
  auto run = h.open(OpenMode::Create);
  const auto s = h.annotate(run);
  EXPECT_EQ(s.ok, 100u);
  EXPECT_EQ(s.transport_failed, 50u);
  EXPECT_EQ(line_count(h.run_dir() / kFailuresFile), 50u);
  EXPECT_EQ(run.failures().size(), 50u);
  for (const auto& f : run.failures()) {
    EXPECT_EQ(f.agent_name, "gamma");
    EXPECT_EQ(f.status, "transport_failed");
  }
  // Two successes still get decided.
  const auto c = h.consolidate(run);
  EXPECT_EQ(c.unresolved, 0u);
  EXPECT_EQ(c.unanimous + c.llm_consolidator, 50u);
}

TEST(Pipeline, RetryFailedReinvokesOnlyFailedPairs) {
  Harness h;
  mock::MockModel flaky;
  flaky.replies["m03"] = "no idea";
  flaky.replies["m07"] = "still no idea";
  h.server().set_model("beta-model", flaky);
  {
    auto run = h.open(OpenMode::Create);
    const auto s = h.annotate(run);
    EXPECT_EQ(s.parse_failed, 2u);
  }
  testing::MockRoster(50, kDisagreeing).install(h.server());
  h.server().reset_counters();
  auto run = h.open(OpenMode::Resume);
  AnnotateOptions opts;
  opts.retry_failed = true;
  const auto s = h.annotate(run, opts);
  EXPECT_EQ(s.tasks, 2u);
  EXPECT_EQ(s.ok, 2u);
  EXPECT_EQ(h.server().requests(), 2u);
  EXPECT_EQ(h.server().requests("beta-model", "m03"), 1u);
  EXPECT_TRUE(run.find("m03")->annotations[1]->ok());
}

TEST(Pipeline, ConsolidatorRunsExactlyOnDisagreements) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  const auto s = h.consolidate(run);
  EXPECT_EQ(s.unanimous, 38u);
  EXPECT_EQ(s.consolidator_invocations, 12u);
  EXPECT_EQ(s.llm_consolidator, 12u);
  EXPECT_EQ(h.server().requests("judge-model"), 12u);
  std::set<std::string> called;
  for (const auto& body : h.server().bodies("judge-model")) called.insert(body["metadata"]["meme_id"]);
  const auto ids = testing::MockRoster(50, kDisagreeing).disagreement_ids();
  EXPECT_EQ(called, std::set<std::string>(ids.begin(), ids.end()));
  for (const auto& m : run.memes()) {
    const bool disputed = called.count(m.meme_id) > 0;
    EXPECT_EQ(*m.method, disputed ? ConsolidationMethod::LlmConsolidator : ConsolidationMethod::MajorityVote);
    if (disputed) {
      EXPECT_EQ(*m.consolidated, HateLabel(CoarseLabel::Hateful, FineLabel::Contempt));
    }
  }
  EXPECT_EQ(line_count(h.run_dir() / kConsolidationFile), 50u);
}

TEST(Pipeline, ConsolidatorPromptListsTheCandidates) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  h.consolidate(run);
  const auto body = h.server().bodies("judge-model").at(0);
  const std::string prompt = body["prompt"];
  EXPECT_NE(prompt.find("slurs"), std::string::npos);
  EXPECT_NE(prompt.find("sarcasm"), std::string::npos);
}

TEST(Pipeline, ConsolidateAllCallsTheConsolidatorEverywhere) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  ConsolidateOptions opts;
  opts.consolidate_all = true;
  const auto s = h.consolidate(run, true, opts);
  EXPECT_EQ(s.consolidator_invocations, 50u);
  EXPECT_EQ(s.unanimous, 0u);
}

TEST(Pipeline, FailedConsolidatorFallsBackToMajority) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  mock::MockModel down;
  down.fail_status = 503;
  h.server().set_model("judge-model", down);
  const auto s = h.consolidate(run);
  EXPECT_EQ(s.majority_fallback, 12u);
  const auto* m = run.find("m03");
  // hateful/mocking, hateful/slurs, not_hateful/sarcasm: coarse majority,
  // tied fine labels.
  EXPECT_EQ(*m->consolidated, HateLabel(CoarseLabel::Hateful));
  EXPECT_EQ(*m->method, ConsolidationMethod::MajorityVote);
  EXPECT_TRUE(m->consolidator_response.has_value());
}

TEST(Pipeline, ConsolidationStateSurvivesReload) {
  Harness h;
  {
    auto run = h.open(OpenMode::Create);
    h.annotate(run);
    h.consolidate(run);
    h.consolidate(run);  // second pass replaces, never appends
  }
  EXPECT_EQ(line_count(h.run_dir() / kConsolidationFile), 50u);
  const auto run = RunStore::load(h.run_dir(), h.manifest());
  std::size_t llm = 0;
  for (const auto& m : run.memes()) llm += m.method == ConsolidationMethod::LlmConsolidator;
  EXPECT_EQ(llm, 12u);
  EXPECT_EQ(run.metadata().consolidator->name, "judge");
}

TEST(Pipeline, ExportsCoverTheScopeAndAreByteIdentical) {
  Harness h;
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  h.consolidate(run);
  const auto first = collect_labels(run, "consolidated");
  EXPECT_EQ(first.entries.size() + first.unresolved.size(), 50u);
  EXPECT_TRUE(write_export(first, h.run_dir() / "a.jsonl").empty());
  const auto reloaded = RunStore::load(h.run_dir(), h.manifest());
  write_export(collect_labels(reloaded, "consolidated"), h.run_dir() / "b.jsonl");
  EXPECT_EQ(testing::read_file(h.run_dir() / "a.jsonl"), testing::read_file(h.run_dir() / "b.jsonl"));
  const auto loaded = dataset::load_label_file(h.run_dir() / "a.jsonl");
  EXPECT_EQ(loaded, first.entries);

  const auto alpha = collect_labels(run, "alpha");
  EXPECT_EQ(alpha.entries.size(), 50u);
  EXPECT_EQ(alpha.entries[0].source, "alpha");
  EXPECT_THROW(collect_labels(run, "delta"), Error);
}

TEST(Pipeline, UnresolvedMemesGoToTheSidecar) {
  Harness h;
  mock::MockModel down;
  down.fail_status = 500;
  h.server().set_model("beta-model", down);
  h.server().set_model("gamma-model", down);
  mock::MockModel garbled;
  garbled.fallback = "???";
  h.server().set_model("alpha-model", garbled);
  auto run = h.open(OpenMode::Create);
  h.annotate(run);
  const auto s = h.consolidate(run);
  EXPECT_EQ(s.unresolved, 50u);
  const auto exp = collect_labels(run, "consolidated");
  EXPECT_TRUE(exp.entries.empty());
  ASSERT_EQ(exp.unresolved.size(), 50u);
  const auto sidecar = write_export(exp, h.run_dir() / "out.jsonl");
  EXPECT_EQ(line_count(sidecar), 50u);
  EXPECT_EQ(line_count(h.run_dir() / "out.jsonl"), 0u);
}

TEST(Pipeline, HumanExportWithoutLabelsWarns) {
  const auto exp = collect_human_labels({"m01", "m02"}, {}, "human");
  EXPECT_TRUE(exp.entries.empty());
  EXPECT_EQ(exp.unresolved.size(), 2u);
  EXPECT_FALSE(exp.warnings.empty());
}

TEST(Pipeline, HumanSourcesNeedDisambiguation) {
  std::vector<service::HumanLabel> labels = {
      {1, "m01", "ann1", HateLabel(CoarseLabel::Hateful), "t", std::nullopt},
      {2, "m01", "ann2", HateLabel(CoarseLabel::NotHateful), "t", std::nullopt},
      {3, "m01", "ann1", HateLabel(CoarseLabel::NotHateful, FineLabel::Humor), "t", std::nullopt},
  };
  EXPECT_THROW(collect_human_labels({"m01"}, labels, "human"), Error);
  const auto ann1 = collect_human_labels({"m01"}, labels, "human:ann1");
  ASSERT_EQ(ann1.entries.size(), 1u);
  EXPECT_EQ(ann1.entries[0].label, HateLabel(CoarseLabel::NotHateful, FineLabel::Humor));
}

// ---- decision rules against a brute-force reference

std::optional<HateLabel> reference_fallback(const std::vector<HateLabel>& labels) {
  std::size_t hateful = 0;
  for (const auto& l : labels) hateful += l.coarse() == CoarseLabel::Hateful;
  const std::size_t other = labels.size() - hateful;
  if (hateful == other) return std::nullopt;
  const CoarseLabel winner = hateful > other ? CoarseLabel::Hateful : CoarseLabel::NotHateful;
  std::map<FineLabel, int> votes;
  for (const auto& l : labels)
    if (l.coarse() == winner && l.fine()) ++votes[*l.fine()];
  int best = 0, at_best = 0;
  FineLabel pick{};
  for (const auto& [f, v] : votes) {
    if (v > best) {
      best = v;
      at_best = 1;
      pick = f;
    } else if (v == best) {
      ++at_best;
    }
  }
  if (at_best == 1) return HateLabel(winner, pick);
  return HateLabel(winner);
}

bool reference_unanimous(const std::vector<HateLabel>& labels) {
  std::set<CoarseLabel> coarse;
  std::set<FineLabel> fine;
  for (const auto& l : labels) {
    coarse.insert(l.coarse());
    if (l.fine()) fine.insert(*l.fine());
  }
  return !labels.empty() && coarse.size() == 1 && fine.size() <= 1;
}

TEST(DecisionRules, AgreeWithTheReferenceOnAllSmallPatterns) {
  const std::vector<HateLabel> alphabet = {
      HateLabel(CoarseLabel::Hateful, FineLabel::Mocking), HateLabel(CoarseLabel::Hateful, FineLabel::Slurs),
      HateLabel(CoarseLabel::Hateful), HateLabel(CoarseLabel::NotHateful, FineLabel::Humor),
      HateLabel(CoarseLabel::NotHateful, FineLabel::Sarcasm), HateLabel(CoarseLabel::NotHateful)};
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<HateLabel> labels;
      for (auto i : idx) labels.push_back(alphabet[i]);
      HateLabel shared(CoarseLabel::Hateful);
      const bool u = unanimous(labels, &shared);
      EXPECT_EQ(u, reference_unanimous(labels));
      if (u) {
        EXPECT_EQ(shared.coarse(), labels[0].coarse());
        for (const auto& l : labels) {
          if (l.fine()) {
            EXPECT_EQ(shared.fine(), l.fine());
          }
        }
      }
      EXPECT_EQ(majority_fallback(labels), reference_fallback(labels));
      ++checked;
      std::size_t k = 0;
      while (k < n && ++idx[k] == alphabet.size()) idx[k++] = 0;
      if (k == n) break;
    }
  }
  EXPECT_EQ(checked, 6u + 36u + 216u + 1296u);
}

TEST(DecisionRules, HandCases) {
  const HateLabel hm(CoarseLabel::Hateful, FineLabel::Mocking), hs(CoarseLabel::Hateful, FineLabel::Slurs),
      nh(CoarseLabel::NotHateful, FineLabel::Humor);
  EXPECT_EQ(majority_fallback({hm, hm, nh}), hm);
  EXPECT_EQ(majority_fallback({hm, hs, nh}), HateLabel(CoarseLabel::Hateful));
  EXPECT_EQ(majority_fallback({hm, nh}), std::nullopt);
  EXPECT_EQ(majority_fallback({}), std::nullopt);
  HateLabel out(CoarseLabel::Hateful);
  EXPECT_TRUE(unanimous({hm, HateLabel(CoarseLabel::Hateful)}, &out));
  EXPECT_EQ(out, hm);
  EXPECT_FALSE(unanimous({hm, hs}, &out));
  EXPECT_FALSE(unanimous({}, &out));
}

}  // namespace
}  // namespace memeanno::pipeline
