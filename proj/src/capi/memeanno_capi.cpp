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

#include "memeanno/memeanno.h"

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agents/cache.hpp"
#include "agents/client.hpp"
#include "agents/config.hpp"
#include "agents/transport.hpp"
#include "common/error.hpp"
#include "dataset/label_file.hpp"
#include "dataset/manifest.hpp"
#include "dataset/split.hpp"
#include "dataset/stats.hpp"
#include "metrics/agreement.hpp"
#include "metrics/evaluation.hpp"
#include "metrics/reports.hpp"
#include "pipeline/export.hpp"
#include "pipeline/orchestrator.hpp"
#include "pipeline/run.hpp"
#include "service/label_journal.hpp"
#include "service/review_service.hpp"

namespace fs = std::filesystem;
namespace ma = memeanno;

struct ma_manifest {
  ma::dataset::Manifest manifest;
};

struct ma_report {
  std::string json;
  std::string table;
  std::vector<std::string> warnings;
  bool degenerate = false;
};

struct ma_run {
  fs::path dir;
  ma::dataset::Manifest manifest;
  std::optional<ma::agents::AgentsConfig> config;
  std::optional<ma::pipeline::RunStore> store;
  std::shared_ptr<ma::agents::ResponseCache> cache;
  std::shared_ptr<ma::agents::HttpTransport> transport;
  std::uint64_t jitter_seed = 0;
  std::vector<std::string> warnings;
};

struct ma_service {
  std::unique_ptr<ma::service::ReviewService> service;
};

namespace {

thread_local std::string g_last_error;

ma_status status_for(ma::ErrorKind kind) {
  switch (kind) {
    case ma::ErrorKind::Argument: return MA_ERR_ARGUMENT;
    case ma::ErrorKind::Schema: return MA_ERR_SCHEMA;
    case ma::ErrorKind::Io: return MA_ERR_IO;
    case ma::ErrorKind::Config: return MA_ERR_CONFIG;
    case ma::ErrorKind::Template: return MA_ERR_TEMPLATE;
    case ma::ErrorKind::Parse: return MA_ERR_PARSE;
    case ma::ErrorKind::Degenerate: return MA_ERR_DEGENERATE;
    case ma::ErrorKind::Internal: return MA_ERR_INTERNAL;
  }
  return MA_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and the thread's last
// error message.
template <typename F>
ma_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MA_OK;
  } catch (const ma::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    g_last_error = e.what();
    return MA_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MA_ERR_INTERNAL;
  }
}

void require(bool condition, const char* what) {
  if (!condition) ma::fail(ma::ErrorKind::Argument, what);
}

std::optional<ma::dataset::Split> split_arg(const char* raw) {
  if (!raw || !*raw) return std::nullopt;
  auto s = ma::dataset::parse_split(raw);
  if (!s) ma::fail(ma::ErrorKind::Argument, std::string("unknown split \"") + raw + "\"");
  return s;
}

ma::metrics::Level level_arg(const char* raw) {
  const std::string text = raw && *raw ? raw : "coarse";
  const auto level = ma::metrics::parse_level(text);
  if (!level) {
    ma::fail(ma::ErrorKind::Argument,
             "unknown level \"" + text + "\" (expected coarse, fine, fine-hateful, fine-not-hateful)");
  }
  return *level;
}

ma_report* make_report(const ma::OrderedJson& json) {
  auto r = std::make_unique<ma_report>();
  r->json = json.dump(2);
  r->table = ma::metrics::render_report(ma::Json::parse(r->json));
  return r.release();
}

ma_report* agreement_report(const std::vector<ma::metrics::NamedVector>& vectors,
                            ma::metrics::Level level) {
  ma::metrics::AgreementOptions opts;
  opts.level = std::string(ma::metrics::token(level));
  const auto report = ma::metrics::agreement_matrix(vectors, opts);
  auto* r = make_report(ma::metrics::to_json(report));
  r->degenerate = report.degenerate();
  for (const auto& n : report.notes) r->warnings.push_back(n);
  for (const auto& p : report.pairs) {
    if (!p.error.empty()) r->warnings.push_back(p.rater_a + " vs " + p.rater_b + ": " + p.error);
  }
  return r;
}

std::vector<ma::pipeline::AnnotatorBinding> bind_annotators(ma_run& run,
                                                            std::vector<std::unique_ptr<ma::agents::AgentClient>>& owned) {
  std::vector<ma::pipeline::AnnotatorBinding> out;
  for (const auto& entry : run.store->metadata().annotators) {
    const auto& cfg = run.config->agent(entry.name);
    owned.push_back(std::make_unique<ma::agents::AgentClient>(cfg, run.cache, run.transport,
                                                              ma::agents::Clock::system(),
                                                              run.jitter_seed));
    out.push_back({owned.back().get(), &run.config->prompt_template(cfg.prompt_template_id)});
  }
  return out;
}

void require_config(const ma_run& run) {
  if (!run.config || !run.store) {
    ma::fail(ma::ErrorKind::Argument, "run was opened without an agents configuration");
  }
}

}  // namespace

extern "C" {

const char* ma_version(void) { return "0.1.0"; }

const char* ma_status_name(ma_status status) {
  switch (status) {
    case MA_OK: return "ok";
    case MA_ERR_ARGUMENT: return "argument";
    case MA_ERR_SCHEMA: return "schema";
    case MA_ERR_IO: return "io";
    case MA_ERR_CONFIG: return "config";
    case MA_ERR_TEMPLATE: return "template";
    case MA_ERR_PARSE: return "parse";
    case MA_ERR_DEGENERATE: return "degenerate";
    case MA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ma_last_error(void) { return g_last_error.c_str(); }

ma_status ma_manifest_load(const char* path, int check_images, ma_manifest** out) {
  return guarded([&] {
    require(path && out, "manifest path and output handle are required");
    ma::dataset::LoadOptions opts;
    opts.check_images = check_images != 0;
    *out = new ma_manifest{ma::dataset::load_manifest(path, opts)};
  });
}

size_t ma_manifest_size(const ma_manifest* m) { return m ? m->manifest.size() : 0; }

const char* ma_manifest_digest(const ma_manifest* m) {
  return m ? m->manifest.digest().c_str() : "";
}

ma_status ma_manifest_split(ma_manifest* m, double train, double dev, double test, uint64_t seed) {
  return guarded([&] {
    require(m, "manifest handle is required");
    m->manifest.mutable_records() =
        ma::dataset::stratified_split(m->manifest.records(), {train, dev, test}, seed);
  });
}

ma_status ma_manifest_save(const ma_manifest* m, const char* path) {
  return guarded([&] {
    require(m && path, "manifest handle and path are required");
    ma::dataset::save_manifest(m->manifest, path);
  });
}

void ma_manifest_free(ma_manifest* m) { delete m; }

ma_status ma_report_ingest(const ma_manifest* m, int images_checked, ma_report** out) {
  return guarded([&] {
    require(m && out, "manifest and output handle are required");
    *out = make_report(ma::dataset::ingest_report(m->manifest, images_checked != 0));
  });
}

ma_status ma_report_stats(const ma_manifest* m, const char* labels_path, const char* fine_labels_path,
                          const char* crosstab_split, ma_report** out) {
  return guarded([&] {
    require(m && labels_path && out, "manifest, label file and output handle are required");
    const auto coarse = ma::dataset::load_label_file(labels_path);
    std::optional<std::vector<ma::dataset::LabelEntry>> fine;
    if (fine_labels_path && *fine_labels_path) {
      fine = ma::dataset::load_label_file(fine_labels_path, {.allow_duplicate_ids = true});
    }
    const auto json = ma::dataset::stats_report(m->manifest, coarse, fine ? &*fine : nullptr,
                                                split_arg(crosstab_split));
    auto* r = make_report(json);
    for (const auto& w : json.at("distribution").at("warnings")) r->warnings.push_back(w.get<std::string>());
    *out = r;
  });
}

ma_status ma_report_agreement(const char* const* names, const char* const* paths, size_t count,
                              const char* level, ma_report** out) {
  return guarded([&] {
    require(names && paths && out, "rater names, paths and output handle are required");
    require(count >= 2, "agreement needs at least two raters");
    const auto lvl = level_arg(level);
    std::vector<ma::metrics::NamedVector> vectors;
    for (size_t i = 0; i < count; ++i) {
      require(names[i] && paths[i], "rater name and path must not be NULL");
      const auto entries = ma::dataset::load_label_file(paths[i]);
      vectors.push_back({names[i], ma::metrics::to_label_vector(entries, lvl).labels});
    }
    *out = agreement_report(vectors, lvl);
  });
}

ma_status ma_report_evaluation(const char* gold_path, const char* pred_path, const char* level,
                               ma_report** out) {
  return guarded([&] {
    require(gold_path && pred_path && out, "gold, prediction and output handle are required");
    const auto lvl = level_arg(level);
    const auto gold = ma::metrics::to_label_vector(ma::dataset::load_label_file(gold_path), lvl);
    const auto pred =
        ma::metrics::to_label_vector(ma::dataset::load_label_file(pred_path), lvl, false);
    const auto report = ma::metrics::evaluate(gold.labels, pred.labels);
    auto* r = make_report(ma::metrics::to_json(report, std::string(ma::metrics::token(lvl))));
    if (report.ignored_predictions > 0) {
      r->warnings.push_back(std::to_string(report.ignored_predictions) +
                            " predictions have no gold label and were ignored");
    }
    *out = r;
  });
}

ma_status ma_report_from_json(const char* json, ma_report** out) {
  return guarded([&] {
    require(json && out, "json text and output handle are required");
    ma::Json parsed;
    try {
      parsed = ma::Json::parse(json);
    } catch (const ma::Json::exception& e) {
      ma::fail(ma::ErrorKind::Schema, std::string("report is not valid JSON: ") + e.what());
    }
    auto r = std::make_unique<ma_report>();
    r->json = json;
    try {
      r->table = ma::metrics::render_report(parsed);
    } catch (const ma::Json::exception& e) {
      ma::fail(ma::ErrorKind::Schema, std::string("malformed report: ") + e.what());
    }
    *out = r.release();
  });
}

const char* ma_report_json(const ma_report* r) { return r ? r->json.c_str() : ""; }
const char* ma_report_table(const ma_report* r) { return r ? r->table.c_str() : ""; }
size_t ma_report_warning_count(const ma_report* r) { return r ? r->warnings.size() : 0; }
const char* ma_report_warning(const ma_report* r, size_t i) {
  return r && i < r->warnings.size() ? r->warnings[i].c_str() : "";
}
int ma_report_degenerate(const ma_report* r) { return r && r->degenerate ? 1 : 0; }
void ma_report_free(ma_report* r) { delete r; }

ma_status ma_run_open(const ma_run_options* o, ma_run** out) {
  return guarded([&] {
    require(o && o->run_dir && out, "run options with a run directory are required");
    auto run = std::make_unique<ma_run>();
    run->dir = o->run_dir;
    run->jitter_seed = o->jitter_seed;

    std::string manifest_path = o->manifest_path ? o->manifest_path : "";
    const bool has_run = fs::exists(run->dir / ma::pipeline::kRunFile);
    if (manifest_path.empty()) {
      if (!has_run) ma::fail(ma::ErrorKind::Argument, "a manifest is required for a new run");
      manifest_path = ma::pipeline::RunStore::read_metadata(run->dir).manifest_path;
    }
    run->manifest = ma::dataset::load_manifest(manifest_path, {.check_images = false});

    if (o->mode == MA_OPEN_EXISTING) {
      run->store.emplace(ma::pipeline::RunStore::load(run->dir, run->manifest));
      if (o->agents_config) run->config = ma::agents::load_agents_config(o->agents_config);
    } else {
      require(o->agents_config != nullptr, "an agents configuration is required");
      if (o->mode == MA_OPEN_CONTINUE && !has_run) {
        ma::fail(ma::ErrorKind::Argument, run->dir.string() + " does not contain a run");
      }
      run->config = ma::agents::load_agents_config(o->agents_config);
      ma::pipeline::RunMetadata meta;
      meta.manifest_path = fs::absolute(manifest_path).string();
      meta.split = split_arg(o->split);
      if (has_run && !o->split) meta.split = ma::pipeline::RunStore::read_metadata(run->dir).split;
      for (const auto& a : run->config->with_role(ma::agents::Role::Annotator)) {
        meta.annotators.push_back({a.name, a.model_id});
      }
      if (meta.annotators.empty()) {
        ma::fail(ma::ErrorKind::Config, "the agents configuration defines no annotators");
      }
      ma::pipeline::OpenMode mode = ma::pipeline::OpenMode::Create;
      if (o->mode == MA_OPEN_RESUME || o->mode == MA_OPEN_CONTINUE) mode = ma::pipeline::OpenMode::Resume;
      if (o->mode == MA_OPEN_FORCE) mode = ma::pipeline::OpenMode::Force;
      run->store.emplace(
          ma::pipeline::RunStore::open(run->dir, run->manifest, std::move(meta), mode));
      run->cache = std::make_shared<ma::agents::ResponseCache>(run->dir / ma::pipeline::kCacheFile);
      run->transport = ma::agents::make_http_transport();
    }
    *out = run.release();
  });
}

const char* ma_run_id(const ma_run* run) {
  return run && run->store ? run->store->metadata().run_id.c_str() : "";
}

size_t ma_run_meme_count(const ma_run* run) {
  return run && run->store ? run->store->memes().size() : 0;
}

ma_status ma_run_annotate(ma_run* run, size_t max_memes, int retry_failed, ma_progress_fn progress,
                          void* user, ma_annotate_result* out) {
  return guarded([&] {
    require(run != nullptr, "run handle is required");
    require_config(*run);
    require(run->cache != nullptr, "run was opened read-only");
    std::vector<std::unique_ptr<ma::agents::AgentClient>> owned;
    const auto bindings = bind_annotators(*run, owned);
    ma::pipeline::AnnotateOptions opts;
    if (max_memes > 0) opts.max_memes = max_memes;
    opts.retry_failed = retry_failed != 0;
    if (progress) opts.on_meme = [progress, user](size_t d, size_t t) { progress(d, t, user); };
    const auto s = ma::pipeline::annotate_all(*run->store, run->manifest, bindings, opts);
    if (out) {
      *out = {s.memes,      s.tasks, s.skipped,      s.cache_hits,
              s.http_requests, s.ok, s.parse_failed, s.transport_failed};
    }
  });
}

ma_status ma_run_consolidate(ma_run* run, const char* consolidator, int consolidate_all,
                             ma_progress_fn progress, void* user, ma_consolidate_result* out) {
  return guarded([&] {
    require(run != nullptr, "run handle is required");
    require_config(*run);
    require(run->cache != nullptr, "run was opened read-only");
    std::unique_ptr<ma::agents::AgentClient> client;
    ma::pipeline::AnnotatorBinding binding;
    const auto candidates = run->config->with_role(ma::agents::Role::Consolidator);
    const ma::agents::AgentConfig* chosen = nullptr;
    if (consolidator && *consolidator) {
      chosen = &run->config->agent(consolidator);
    } else if (candidates.size() == 1) {
      chosen = &run->config->agent(candidates.front().name);
    } else if (candidates.size() > 1) {
      ma::fail(ma::ErrorKind::Argument, "several consolidators configured; choose one by name");
    }
    if (chosen) {
      client = std::make_unique<ma::agents::AgentClient>(*chosen, run->cache, run->transport,
                                                         ma::agents::Clock::system(),
                                                         run->jitter_seed);
      binding = {client.get(), &run->config->prompt_template(chosen->prompt_template_id)};
    }
    ma::pipeline::ConsolidateOptions opts;
    opts.consolidate_all = consolidate_all != 0;
    if (progress) opts.on_meme = [progress, user](size_t d, size_t t) { progress(d, t, user); };
    const auto s = ma::pipeline::consolidate_all(*run->store, run->manifest, binding, opts);
    const auto labels = ma::pipeline::collect_labels(*run->store, "consolidated");
    ma::pipeline::write_export(labels, run->dir / ma::pipeline::kConsolidatedLabelsFile);
    if (out) {
      *out = {s.memes,           s.pending,           s.unanimous,
              s.consolidator_invocations, s.llm_consolidator, s.majority_fallback,
              s.unresolved,      s.cache_hits,        s.http_requests};
    }
  });
}

ma_status ma_run_export(ma_run* run, const char* source, const char* out_path, ma_export_result* out) {
  return guarded([&] {
    require(run && run->store && source && out_path, "run, source and output path are required");
    run->warnings.clear();
    const auto labels = ma::pipeline::collect_labels(*run->store, source);
    ma::pipeline::write_export(labels, out_path);
    run->warnings = labels.warnings;
    if (out) *out = {labels.entries.size(), labels.unresolved.size()};
  });
}

ma_status ma_run_agreement(ma_run* run, const char* level, ma_report** out) {
  return guarded([&] {
    require(run && run->store && out, "run and output handle are required");
    const auto lvl = level_arg(level);
    const auto humans =
        ma::service::read_human_labels(run->dir / ma::pipeline::kHumanLabelsFile);
    std::vector<ma::metrics::NamedVector> vectors;
    for (const auto& src : ma::pipeline::run_label_sources(*run->store, humans)) {
      vectors.push_back({src.name, ma::metrics::to_label_vector(src.entries, lvl).labels});
    }
    *out = agreement_report(vectors, lvl);
  });
}

size_t ma_run_warning_count(const ma_run* run) { return run ? run->warnings.size() : 0; }
const char* ma_run_warning(const ma_run* run, size_t i) {
  return run && i < run->warnings.size() ? run->warnings[i].c_str() : "";
}
void ma_run_free(ma_run* run) { delete run; }

ma_status ma_service_start(const ma_service_options* o, ma_service** out) {
  return guarded([&] {
    require(o && o->manifest_path && out, "service options with a manifest are required");
    ma::service::ServiceOptions opts;
    if (o->host && *o->host) opts.host = o->host;
    opts.port = o->port;
    if (o->cors_origin && *o->cors_origin) opts.cors_origin = o->cors_origin;
    std::optional<fs::path> run_dir, labels;
    if (o->run_dir && *o->run_dir) run_dir = o->run_dir;
    if (o->labels_path && *o->labels_path) labels = o->labels_path;
    auto svc = std::make_unique<ma_service>();
    svc->service = std::make_unique<ma::service::ReviewService>(
        ma::dataset::load_manifest(o->manifest_path, {.check_images = false}), run_dir, labels,
        opts);
    svc->service->start();
    *out = svc.release();
  });
}

int ma_service_port(const ma_service* s) { return s ? s->service->port() : -1; }

void ma_service_stop(ma_service* s) {
  if (s) s->service->stop();
}

void ma_service_free(ma_service* s) { delete s; }

}  // extern "C"
