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

#include "pipeline/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "agents/prompt.hpp"
#include "common/error.hpp"

namespace memeanno::pipeline {

using agents::AgentResponse;
using agents::InvokeResult;
using agents::ResponseStatus;
using dataset::HateLabel;

namespace {

struct Task {
  std::size_t meme = 0;
  std::size_t slot = 0;  // annotator index, unused for consolidation
  bool refresh = false;  // bypass the cache lookup
};

struct Outcome {
  Task task;
  InvokeResult result;
  std::exception_ptr error;
};

// Worker threads pull tasks from per-lane lists and hand outcomes to the
// calling thread, which is the only one that touches run state.
class WorkerPool {
 public:
  using Work = std::function<InvokeResult(const Task&)>;

  void add_lane(std::vector<Task> tasks, int parallelism, Work work) {
    auto lane = std::make_unique<Lane>();
    lane->tasks = std::move(tasks);
    lane->work = std::move(work);
    lanes_.push_back(std::move(lane));
    parallelism_.push_back(std::max(1, parallelism));
  }

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& l : lanes_) n += l->tasks.size();
    return n;
  }

  void run(const std::function<void(Outcome&)>& consume) {
    const std::size_t expected = total();
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      const int n = std::min<int>(parallelism_[i], static_cast<int>(lanes_[i]->tasks.size()));
      for (int t = 0; t < n; ++t) threads_.emplace_back([this, i] { drain(*lanes_[i]); });
    }
    std::exception_ptr failure;
    for (std::size_t received = 0; received < expected && !failure; ++received) {
      Outcome o;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !outcomes_.empty(); });
        o = std::move(outcomes_.front());
        outcomes_.pop_front();
      }
      if (o.error) {
        failure = o.error;
        break;
      }
      try {
        consume(o);
      } catch (...) {
        failure = std::current_exception();
      }
    }
    stop_ = true;
    for (auto& t : threads_) t.join();
    threads_.clear();
    if (failure) std::rethrow_exception(failure);
  }

 private:
  struct Lane {
    std::vector<Task> tasks;
    std::atomic<std::size_t> next{0};
    Work work;
  };

  void drain(Lane& lane) {
    while (!stop_) {
      const std::size_t i = lane.next.fetch_add(1);
      if (i >= lane.tasks.size()) return;
      Outcome o;
      o.task = lane.tasks[i];
      try {
        o.result = lane.work(o.task);
      } catch (...) {
        o.error = std::current_exception();
      }
      {
        std::lock_guard lock(mu_);
        outcomes_.push_back(std::move(o));
      }
      cv_.notify_one();
    }
  }

  std::vector<std::unique_ptr<Lane>> lanes_;
  std::vector<int> parallelism_;
  std::vector<std::thread> threads_;
  std::atomic<bool> stop_{false};
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Outcome> outcomes_;
};

const dataset::MemeRecord& record_for(const dataset::Manifest& manifest, const std::string& id) {
  const auto* r = manifest.find(id);
  if (!r) fail(ErrorKind::Internal, "meme \"" + id + "\" missing from manifest");
  return *r;
}

}  // namespace

AnnotateSummary annotate_all(RunStore& run, const dataset::Manifest& manifest,
                             const std::vector<AnnotatorBinding>& annotators,
                             const AnnotateOptions& options) {
  if (annotators.size() != run.metadata().annotators.size()) {
    fail(ErrorKind::Argument, "annotator bindings do not match the run roster");
  }
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    const auto& b = annotators[a];
    if (!b.client || !b.prompt) fail(ErrorKind::Argument, "incomplete annotator binding");
    if (b.client->config().role != agents::Role::Annotator) {
      fail(ErrorKind::Config, "agent \"" + b.client->config().name + "\" is not an annotator");
    }
    if (b.client->config().name != run.metadata().annotators[a].name) {
      fail(ErrorKind::Argument, "annotator bindings are not in roster order");
    }
  }

  const auto& memes = run.memes();
  const std::size_t scope = std::min(memes.size(), options.max_memes.value_or(memes.size()));

  AnnotateSummary summary;
  summary.memes = scope;
  WorkerPool pool;
  std::vector<int> remaining(scope, 0);
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < scope; ++m) {
      const auto& slot = memes[m].annotations[a];
      if (slot && (slot->ok() || !options.retry_failed)) {
        ++summary.skipped;
        continue;
      }
      tasks.push_back({m, a, slot.has_value()});
      ++remaining[m];
    }
    const AnnotatorBinding b = annotators[a];
    pool.add_lane(std::move(tasks), b.client->config().max_parallel,
                  [&run, &manifest, b](const Task& t) {
                    const auto& meme = record_for(manifest, run.memes()[t.meme].meme_id);
                    const auto prompt =
                        agents::render_prompt(*b.prompt, meme, manifest.resolve_image(meme));
                    return b.client->invoke(prompt, meme.id, t.refresh);
                  });
  }
  summary.tasks = pool.total();

  std::size_t completed = 0;
  for (std::size_t m = 0; m < scope; ++m) {
    if (remaining[m] == 0) ++completed;
  }

  pool.run([&](Outcome& o) {
    const auto& r = o.result;
    if (o.result.cache_hit) ++summary.cache_hits;
    summary.http_requests += static_cast<std::size_t>(r.http_requests);
    switch (r.response.status) {
      case ResponseStatus::Ok: ++summary.ok; break;
      case ResponseStatus::ParseFailed: ++summary.parse_failed; break;
      case ResponseStatus::TransportFailed: ++summary.transport_failed; break;
    }
    run.record_annotation(o.task.meme, o.task.slot, r.response);
    if (--remaining[o.task.meme] == 0) {
      run.save_state();
      ++completed;
      if (options.on_meme) options.on_meme(completed, scope);
    }
  });
  run.save_state();
  return summary;
}

bool unanimous(const std::vector<HateLabel>& labels, HateLabel* out) {
  if (labels.empty()) return false;
  const auto coarse = labels.front().coarse();
  std::optional<dataset::FineLabel> fine;
  for (const auto& l : labels) {
    if (l.coarse() != coarse) return false;
    if (!l.fine()) continue;
    if (fine && *fine != *l.fine()) return false;
    fine = l.fine();
  }
  if (out) *out = HateLabel(coarse, fine);
  return true;
}

std::optional<HateLabel> majority_fallback(const std::vector<HateLabel>& labels) {
  std::map<dataset::CoarseLabel, std::size_t> coarse_votes;
  for (const auto& l : labels) ++coarse_votes[l.coarse()];
  std::optional<dataset::CoarseLabel> winner;
  for (const auto& [c, n] : coarse_votes) {
    if (2 * n > labels.size()) winner = c;
  }
  if (!winner) return std::nullopt;

  std::map<dataset::FineLabel, std::size_t> fine_votes;
  for (const auto& l : labels) {
    if (l.coarse() == *winner && l.fine()) ++fine_votes[*l.fine()];
  }
  std::optional<dataset::FineLabel> fine;
  std::size_t best = 0;
  bool tied = false;
  for (const auto& [f, n] : fine_votes) {
    if (n > best) {
      best = n;
      fine = f;
      tied = false;
    } else if (n == best) {
      tied = true;
    }
  }
  if (tied) fine.reset();
  return HateLabel(*winner, fine);
}

ConsolidateSummary consolidate_all(RunStore& run, const dataset::Manifest& manifest,
                                   const AnnotatorBinding& consolidator,
                                   const ConsolidateOptions& options) {
  if (consolidator.client) {
    if (!consolidator.prompt) fail(ErrorKind::Argument, "consolidator binding has no prompt");
    const auto& cfg = consolidator.client->config();
    if (cfg.role != agents::Role::Consolidator) {
      fail(ErrorKind::Config, "agent \"" + cfg.name + "\" is not a consolidator");
    }
    run.set_consolidator({cfg.name, cfg.model_id});
  }
  run.reset_consolidation();

  ConsolidateSummary summary;
  const auto& memes = run.memes();
  summary.memes = memes.size();
  std::vector<Task> calls;
  std::size_t completed = 0;
  const auto done = [&] {
    ++completed;
    if (options.on_meme) options.on_meme(completed, memes.size());
  };

  // Decide everything that needs no agent call first.
  for (std::size_t m = 0; m < memes.size(); ++m) {
    if (!memes[m].annotated()) {
      ++summary.pending;
      done();
      continue;
    }
    const auto labels = memes[m].successful_labels();
    HateLabel shared = HateLabel(dataset::CoarseLabel::NotHateful);
    if (labels.empty()) {
      run.record_consolidation(m, std::nullopt, ConsolidationMethod::Unresolved, std::nullopt);
      ++summary.unresolved;
      done();
    } else if (!options.consolidate_all && unanimous(labels, &shared)) {
      run.record_consolidation(m, shared, ConsolidationMethod::MajorityVote, std::nullopt);
      ++summary.unanimous;
      done();
    } else if (!consolidator.client) {
      const auto fallback = majority_fallback(labels);
      run.record_consolidation(m, fallback,
                               fallback ? ConsolidationMethod::MajorityVote
                                        : ConsolidationMethod::Unresolved,
                               std::nullopt);
      ++(fallback ? summary.majority_fallback : summary.unresolved);
      done();
    } else {
      calls.push_back({m, 0, false});
    }
  }

  if (!calls.empty()) {
    WorkerPool pool;
    const AnnotatorBinding b = consolidator;
    pool.add_lane(calls, b.client->config().max_parallel, [&run, &manifest, b](const Task& t) {
      const auto& state = run.memes()[t.meme];
      const auto& meme = record_for(manifest, state.meme_id);
      const auto candidates = state.successful_labels();
      const auto prompt =
          agents::render_prompt(*b.prompt, meme, manifest.resolve_image(meme), &candidates);
      return b.client->invoke(prompt, meme.id);
    });
    pool.run([&](Outcome& o) {
      ++summary.consolidator_invocations;
      if (o.result.cache_hit) ++summary.cache_hits;
      summary.http_requests += static_cast<std::size_t>(o.result.http_requests);
      const AgentResponse& r = o.result.response;
      if (r.ok()) {
        run.record_consolidation(o.task.meme, *r.parsed, ConsolidationMethod::LlmConsolidator, r);
        ++summary.llm_consolidator;
      } else {
        const auto fallback = majority_fallback(run.memes()[o.task.meme].successful_labels());
        run.record_consolidation(o.task.meme, fallback,
                                 fallback ? ConsolidationMethod::MajorityVote
                                          : ConsolidationMethod::Unresolved,
                                 r);
        ++(fallback ? summary.majority_fallback : summary.unresolved);
      }
      done();
    });
  }
  run.compact_consolidation();
  run.save_state();
  return summary;
}

}  // namespace memeanno::pipeline
