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

// Command-line front end over the memeanno C API.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "memeanno/memeanno.h"

namespace {

namespace fs = std::filesystem;

enum Exit : int {
  kOk = 0,
  kRuntime = 1,
  kUsage = 2,
  kValidation = 3,
  kPartial = 4,
  kDegenerate = 5,
};

int exit_for(ma_status status) {
  switch (status) {
    case MA_OK: return kOk;
    case MA_ERR_ARGUMENT: return kUsage;
    case MA_ERR_SCHEMA:
    case MA_ERR_CONFIG:
    case MA_ERR_TEMPLATE: return kValidation;
    case MA_ERR_DEGENERATE: return kDegenerate;
    default: return kRuntime;
  }
}

int report_failure(ma_status status) {
  std::cerr << "error (" << ma_status_name(status) << "): " << ma_last_error() << "\n";
  return exit_for(status);
}

struct ReportOutput {
  bool json = false;
  std::string out_dir;
};

void add_report_flags(CLI::App* cmd, ReportOutput& out) {
  cmd->add_flag("--json", out.json, "Print the JSON report instead of the table");
  cmd->add_option("--out-dir", out.out_dir, "Also write <kind>.json into this directory");
}

// Prints and optionally stores a report, then frees it.
int emit(ma_report* report, const ReportOutput& out, const char* kind) {
  if (!out.out_dir.empty()) {
    fs::create_directories(out.out_dir);
    std::ofstream(fs::path(out.out_dir) / (std::string(kind) + ".json")) << ma_report_json(report) << "\n";
  }
  if (out.json) {
    std::cout << ma_report_json(report) << "\n";
    for (size_t i = 0; i < ma_report_warning_count(report); ++i) {
      std::cerr << "warning: " << ma_report_warning(report, i) << "\n";
    }
  } else {
    std::cout << ma_report_table(report);
  }
  const bool degenerate = ma_report_degenerate(report) != 0;
  ma_report_free(report);
  return degenerate ? kDegenerate : kOk;
}

void print_progress(size_t done, size_t total, void* label) {
  std::fprintf(stderr, "\r%s %zu/%zu", static_cast<const char*>(label), done, total);
  if (done == total) std::fputc('\n', stderr);
}

// "name=path" keeps the name; a bare path is named after its file stem with
// any "labels." prefix dropped.
std::pair<std::string, std::string> rater_arg(const std::string& raw) {
  if (const auto eq = raw.find('='); eq != std::string::npos && eq > 0) {
    return {raw.substr(0, eq), raw.substr(eq + 1)};
  }
  std::string stem = fs::path(raw).stem().string();
  if (stem.rfind("labels.", 0) == 0) stem = stem.substr(7);
  return {stem, raw};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meme hate-speech annotation toolkit: datasets, LLM agent annotation, agreement and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ma_version()));

  // ingest
  std::string manifest_path;
  bool no_image_check = false;
  ReportOutput ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and summarize it");
  ingest->add_option("manifest", manifest_path, "Manifest JSONL file")->required()->check(CLI::ExistingFile);
  ingest->add_flag("--no-image-check", no_image_check, "Do not require image files to exist");
  add_report_flags(ingest, ingest_out);

  // split
  std::string split_out;
  std::vector<double> ratios{0.7, 0.1, 0.2};
  std::uint64_t seed = 13;
  bool split_no_image_check = false;
  auto* split = app.add_subcommand("split", "Assign train/dev/test splits stratified by propaganda label");
  split->add_option("manifest", manifest_path, "Manifest JSONL file")->required()->check(CLI::ExistingFile);
  split->add_option("--out", split_out, "Where to write the split manifest")->required();
  split->add_option("--ratios", ratios, "train,dev,test fractions summing to 1")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  split->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  split->add_flag("--no-image-check", split_no_image_check, "Do not require image files to exist");

  // annotate
  std::string agents_path, run_dir, scope_split;
  bool resume = false, force = false, retry_failed = false;
  std::size_t max_memes = 0;
  auto* annotate = app.add_subcommand("annotate", "Collect labels from every annotator agent");
  annotate->add_option("--manifest", manifest_path, "Manifest JSONL file (default: the run's)")
      ->check(CLI::ExistingFile);
  annotate->add_option("--agents", agents_path, "Agents configuration JSON")->required()->check(CLI::ExistingFile);
  annotate->add_option("--run-dir", run_dir, "Run directory")->required();
  annotate->add_option("--split", scope_split, "Only annotate memes of this split");
  auto* resume_flag = annotate->add_flag("--resume", resume, "Continue an existing run");
  annotate->add_flag("--force", force, "Restart an existing run (the response cache is kept)")->excludes(resume_flag);
  annotate->add_option("--max-memes", max_memes, "Stop after this many memes (0: all)");
  annotate->add_flag("--retry-failed", retry_failed, "Re-request pairs whose earlier response failed");
  annotate->add_option("--seed", seed, "Retry jitter seed")->capture_default_str();

  // consolidate
  std::string consolidator;
  bool consolidate_all = false;
  auto* consolidate = app.add_subcommand("consolidate", "Resolve annotator disagreements");
  consolidate->add_option("--agents", agents_path, "Agents configuration JSON")->required()->check(CLI::ExistingFile);
  consolidate->add_option("--run-dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  consolidate->add_option("--consolidator", consolidator, "Consolidator agent name");
  consolidate->add_flag("--consolidate-all", consolidate_all, "Call the consolidator for unanimous memes too");
  consolidate->add_option("--seed", seed, "Retry jitter seed")->capture_default_str();

  // export
  std::string source = "consolidated", export_out;
  auto* exp = app.add_subcommand("export", "Write one label source of a run as a label file");
  exp->add_option("--run-dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--source", source, "consolidated, an agent name, human or human:<annotator>")
      ->capture_default_str();
  exp->add_option("--out", export_out, "Output label file")->required();

  // agree
  std::vector<std::string> raters;
  std::string level = "coarse";
  bool fine_agreement = false;
  ReportOutput agree_out;
  auto* agree = app.add_subcommand("agree", "Cohen's and Fleiss' kappa between label files");
  agree->add_option("labels", raters, "Label files, optionally as name=path");
  agree->add_option("--run-dir", run_dir, "Use every label source of this run")->check(CLI::ExistingDirectory);
  agree->add_option("--level", level, "coarse, fine, fine-hateful or fine-not-hateful")->capture_default_str();
  agree->add_flag("--fine-grained-agreement", fine_agreement, "Shorthand for --level fine");
  add_report_flags(agree, agree_out);

  // stats
  std::string labels_path, fine_labels_path, crosstab_split;
  ReportOutput stats_out;
  auto* stats = app.add_subcommand("stats", "Label distribution, propaganda crosstab and class weights");
  stats->add_option("--manifest", manifest_path, "Manifest JSONL file")->required()->check(CLI::ExistingFile);
  stats->add_option("--labels", labels_path, "Coarse label file")->required()->check(CLI::ExistingFile);
  stats->add_option("--fine-labels", fine_labels_path, "Separate fine-grained label layer")->check(CLI::ExistingFile);
  stats->add_option("--crosstab-split", crosstab_split, "Restrict the crosstab to one split");
  add_report_flags(stats, stats_out);

  // eval
  std::string gold_path, pred_path;
  ReportOutput eval_out;
  auto* eval = app.add_subcommand("eval", "Accuracy, macro-F1 and per-class scores against gold labels");
  eval->add_option("--gold", gold_path, "Gold label file")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", pred_path, "Predicted label file")->required()->check(CLI::ExistingFile);
  eval->add_option("--level", level, "coarse, fine, fine-hateful or fine-not-hateful")->capture_default_str();
  add_report_flags(eval, eval_out);

  // serve
  std::string host = "127.0.0.1", cors_origin = "*", human_labels;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the review service for human annotation");
  serve->add_option("--manifest", manifest_path, "Manifest JSONL file")->required()->check(CLI::ExistingFile);
  serve->add_option("--run-dir", run_dir, "Run directory with agent labels")->check(CLI::ExistingDirectory);
  serve->add_option("--labels", human_labels, "Human label journal (default: in the run directory)");
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port (0: any free port)")->capture_default_str();
  serve->add_option("--cors-origin", cors_origin, "Allowed CORS origin")->capture_default_str();

  // render
  std::string report_path;
  auto* render = app.add_subcommand("render", "Re-render a JSON report written by this tool");
  render->add_option("report", report_path, "Report JSON file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const bool interactive = isatty(STDERR_FILENO) != 0;
  ma_status st = MA_OK;

  if (*ingest) {
    ma_manifest* m = nullptr;
    if ((st = ma_manifest_load(manifest_path.c_str(), !no_image_check, &m)) != MA_OK) return report_failure(st);
    ma_report* r = nullptr;
    st = ma_report_ingest(m, !no_image_check, &r);
    ma_manifest_free(m);
    if (st != MA_OK) return report_failure(st);
    return emit(r, ingest_out, "ingest");
  }

  if (*split) {
    ma_manifest* m = nullptr;
    if ((st = ma_manifest_load(manifest_path.c_str(), !split_no_image_check, &m)) != MA_OK) return report_failure(st);
    if ((st = ma_manifest_split(m, ratios[0], ratios[1], ratios[2], seed)) != MA_OK ||
        (st = ma_manifest_save(m, split_out.c_str())) != MA_OK) {
      ma_manifest_free(m);
      return report_failure(st);
    }
    ma_report* r = nullptr;
    st = ma_report_ingest(m, !split_no_image_check, &r);
    ma_manifest_free(m);
    if (st != MA_OK) return report_failure(st);
    return emit(r, {}, "ingest");
  }

  if (*annotate) {
    ma_run_options o{};
    o.run_dir = run_dir.c_str();
    o.manifest_path = manifest_path.empty() ? nullptr : manifest_path.c_str();
    o.agents_config = agents_path.c_str();
    o.split = scope_split.empty() ? nullptr : scope_split.c_str();
    o.mode = resume ? MA_OPEN_RESUME : force ? MA_OPEN_FORCE : MA_OPEN_CREATE;
    o.jitter_seed = seed;
    ma_run* run = nullptr;
    if ((st = ma_run_open(&o, &run)) != MA_OK) return report_failure(st);
    ma_annotate_result res{};
    char label[] = "annotated";
    st = ma_run_annotate(run, max_memes, retry_failed, interactive ? print_progress : nullptr, label, &res);
    ma_run_free(run);
    if (st != MA_OK) return report_failure(st);
    std::cout << "annotated " << res.memes << " memes: " << res.cache_hits << "/" << res.tasks
              << " cached, " << res.http_requests << " requests\n"
              << "  ok " << res.ok << ", parse_failed " << res.parse_failed << ", transport_failed "
              << res.transport_failed << ", resumed " << res.skipped << "\n";
    return res.parse_failed + res.transport_failed > 0 ? kPartial : kOk;
  }

  if (*consolidate) {
    ma_run_options o{};
    o.run_dir = run_dir.c_str();
    o.agents_config = agents_path.c_str();
    o.mode = MA_OPEN_CONTINUE;
    o.jitter_seed = seed;
    ma_run* run = nullptr;
    if ((st = ma_run_open(&o, &run)) != MA_OK) return report_failure(st);
    ma_consolidate_result res{};
    char label[] = "consolidated";
    st = ma_run_consolidate(run, consolidator.empty() ? nullptr : consolidator.c_str(), consolidate_all,
                            interactive ? print_progress : nullptr, label, &res);
    ma_run_free(run);
    if (st != MA_OK) return report_failure(st);
    std::cout << "consolidated " << res.memes << " memes: " << res.unanimous << " unanimous, "
              << res.llm_consolidator << " llm_consolidator, " << res.majority_fallback
              << " majority fallback, " << res.unresolved << " unresolved, " << res.pending << " pending\n"
              << "  consolidator calls " << res.consolidator_invocations << " (" << res.cache_hits
              << " cached, " << res.http_requests << " requests)\n";
    return res.unresolved + res.pending > 0 ? kPartial : kOk;
  }

  if (*exp) {
    ma_run_options o{};
    o.run_dir = run_dir.c_str();
    o.mode = MA_OPEN_EXISTING;
    ma_run* run = nullptr;
    if ((st = ma_run_open(&o, &run)) != MA_OK) return report_failure(st);
    ma_export_result res{};
    st = ma_run_export(run, source.c_str(), export_out.c_str(), &res);
    for (size_t i = 0; i < ma_run_warning_count(run); ++i) std::cerr << "warning: " << ma_run_warning(run, i) << "\n";
    ma_run_free(run);
    if (st != MA_OK) return report_failure(st);
    std::cout << "exported " << res.exported << " labels from " << source << " to " << export_out;
    if (res.unresolved > 0) std::cout << "; " << res.unresolved << " unresolved listed in " << export_out << ".unresolved.jsonl";
    std::cout << "\n";
    const bool human = source == "human" || source.rfind("human:", 0) == 0;
    return res.unresolved > 0 && !human ? kPartial : kOk;
  }

  if (*agree) {
    if (fine_agreement) level = "fine";
    ma_report* r = nullptr;
    if (!run_dir.empty()) {
      if (!raters.empty()) {
        std::cerr << "error: pass label files or --run-dir, not both\n";
        return kUsage;
      }
      ma_run_options o{};
      o.run_dir = run_dir.c_str();
      o.mode = MA_OPEN_EXISTING;
      ma_run* run = nullptr;
      if ((st = ma_run_open(&o, &run)) != MA_OK) return report_failure(st);
      st = ma_run_agreement(run, level.c_str(), &r);
      ma_run_free(run);
    } else {
      if (raters.size() < 2) {
        std::cerr << "error: agree needs at least two label files\n";
        return kUsage;
      }
      std::vector<std::string> names, paths;
      for (const auto& raw : raters) {
        auto [name, path] = rater_arg(raw);
        if (!fs::is_regular_file(path)) {
          std::cerr << "error: label file not found: " << path << "\n";
          return kUsage;
        }
        names.push_back(name);
        paths.push_back(path);
      }
      std::vector<const char*> cn, cp;
      for (std::size_t i = 0; i < names.size(); ++i) {
        cn.push_back(names[i].c_str());
        cp.push_back(paths[i].c_str());
      }
      st = ma_report_agreement(cn.data(), cp.data(), cn.size(), level.c_str(), &r);
    }
    if (st != MA_OK) return report_failure(st);
    return emit(r, agree_out, "agreement");
  }

  if (*stats) {
    ma_manifest* m = nullptr;
    if ((st = ma_manifest_load(manifest_path.c_str(), 0, &m)) != MA_OK) return report_failure(st);
    ma_report* r = nullptr;
    st = ma_report_stats(m, labels_path.c_str(), fine_labels_path.empty() ? nullptr : fine_labels_path.c_str(),
                         crosstab_split.empty() ? nullptr : crosstab_split.c_str(), &r);
    ma_manifest_free(m);
    if (st != MA_OK) return report_failure(st);
    return emit(r, stats_out, "stats");
  }

  if (*eval) {
    ma_report* r = nullptr;
    if ((st = ma_report_evaluation(gold_path.c_str(), pred_path.c_str(), level.c_str(), &r)) != MA_OK) {
      return report_failure(st);
    }
    return emit(r, eval_out, "evaluation");
  }

  if (*serve) {
    // Block termination signals before any thread starts so sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ma_service_options o{};
    o.manifest_path = manifest_path.c_str();
    o.run_dir = run_dir.empty() ? nullptr : run_dir.c_str();
    o.labels_path = human_labels.empty() ? nullptr : human_labels.c_str();
    o.host = host.c_str();
    o.port = port;
    o.cors_origin = cors_origin.c_str();
    ma_service* svc = nullptr;
    if ((st = ma_service_start(&o, &svc)) != MA_OK) return report_failure(st);
    std::cout << "serving on http://" << host << ":" << ma_service_port(svc) << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    ma_service_stop(svc);
    ma_service_free(svc);
    std::cerr << "stopped\n";
    return kOk;
  }

  if (*render) {
    std::ifstream in(report_path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ma_report* r = nullptr;
    if ((st = ma_report_from_json(text.c_str(), &r)) != MA_OK) return report_failure(st);
    std::cout << ma_report_table(r);
    ma_report_free(r);
    return kOk;
  }
  return kUsage;
}
