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

#include "pipeline/export.hpp"

#include <map>
#include <optional>
#include <set>

#include "common/error.hpp"
#include "service/label_journal.hpp"

namespace memeanno::pipeline {

namespace fs = std::filesystem;
using dataset::LabelEntry;

namespace {

std::string failure_reason(const std::optional<agents::AgentResponse>& r) {
  if (!r) return "not annotated";
  std::string reason(agents::token(r->status));
  if (!r->error.empty()) reason += ": " + r->error;
  return reason;
}

void collect_consolidated(const RunStore& run, LabelExport& out) {
  for (const auto& m : run.memes()) {
    if (m.consolidated) {
      out.entries.push_back({m.meme_id, *m.consolidated, std::string(dataset::kSourceConsolidated)});
    } else if (!m.method) {
      out.unresolved.push_back({m.meme_id, m.annotated() ? "not consolidated" : "not annotated"});
    } else if (m.successful_labels().empty()) {
      out.unresolved.push_back({m.meme_id, "no successful annotator response"});
    } else {
      out.unresolved.push_back({m.meme_id, "coarse majority tie"});
    }
  }
}

}  // namespace

LabelExport collect_labels(const RunStore& run, const std::string& source) {
  LabelExport out;
  out.source = source;
  if (source == dataset::kSourceConsolidated) {
    collect_consolidated(run, out);
    return out;
  }
  if (source == dataset::kSourceHuman || source.rfind("human:", 0) == 0) {
    std::vector<std::string> scope;
    for (const auto& m : run.memes()) scope.push_back(m.meme_id);
    return collect_human_labels(scope, service::read_human_labels(run.dir() / kHumanLabelsFile),
                                source);
  }

  const auto& meta = run.metadata();
  for (std::size_t a = 0; a < meta.annotators.size(); ++a) {
    if (meta.annotators[a].name != source) continue;
    for (const auto& m : run.memes()) {
      const auto& r = m.annotations[a];
      if (r && r->ok()) {
        out.entries.push_back({m.meme_id, *r->parsed, source});
      } else {
        out.unresolved.push_back({m.meme_id, failure_reason(r)});
      }
    }
    return out;
  }
  if (meta.consolidator && meta.consolidator->name == source) {
    for (const auto& m : run.memes()) {
      const auto& r = m.consolidator_response;
      if (r && r->ok()) {
        out.entries.push_back({m.meme_id, *r->parsed, source});
      } else {
        out.unresolved.push_back({m.meme_id, r ? failure_reason(r) : "consolidator not called"});
      }
    }
    return out;
  }

  std::string known = "consolidated, human";
  for (const auto& a : meta.annotators) known += ", " + a.name;
  if (meta.consolidator) known += ", " + meta.consolidator->name;
  fail(ErrorKind::Argument, "unknown label source \"" + source + "\" (known: " + known + ")");
}

LabelExport collect_human_labels(const std::vector<std::string>& scope_ids,
                                 const std::vector<service::HumanLabel>& labels,
                                 const std::string& source) {
  LabelExport out;
  out.source = source;
  std::string annotator;
  if (source.rfind("human:", 0) == 0) {
    annotator = source.substr(6);
  } else if (source == dataset::kSourceHuman) {
    std::set<std::string> names;
    for (const auto& h : labels) names.insert(h.annotator);
    if (names.size() > 1) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + ("human:" + n);
      fail(ErrorKind::Argument, "several human annotators; choose one of " + list);
    }
    if (names.size() == 1) annotator = *names.begin();
  } else {
    fail(ErrorKind::Argument, "\"" + source + "\" is not a human label source");
  }
  std::map<std::string, dataset::HateLabel> by_meme;
  for (const auto& h : labels) {
    if (h.annotator == annotator) by_meme.insert_or_assign(h.meme_id, h.label);
  }
  if (by_meme.empty()) out.warnings.push_back("no human labels recorded for source \"" + source + "\"");
  for (const auto& id : scope_ids) {
    const auto it = by_meme.find(id);
    if (it != by_meme.end()) {
      out.entries.push_back({id, it->second, std::string(dataset::kSourceHuman)});
    } else {
      out.unresolved.push_back({id, "no human label"});
    }
  }
  return out;
}

std::vector<NamedLabels> run_label_sources(const RunStore& run,
                                           const std::vector<service::HumanLabel>& humans) {
  std::vector<NamedLabels> out;
  for (const auto& a : run.metadata().annotators) {
    out.push_back({a.name, collect_labels(run, a.name).entries});
  }
  auto consolidated = collect_labels(run, std::string(dataset::kSourceConsolidated)).entries;
  if (!consolidated.empty()) out.push_back({"consolidated", std::move(consolidated)});
  std::vector<std::string> scope;
  for (const auto& m : run.memes()) scope.push_back(m.meme_id);
  std::set<std::string> names;
  for (const auto& h : humans) names.insert(h.annotator);
  for (const auto& n : names) {
    out.push_back({names.size() == 1 ? "human" : "human:" + n,
                   collect_human_labels(scope, humans, "human:" + n).entries});
  }
  return out;
}

OrderedJson unresolved_json(const UnresolvedEntry& entry) {
  return OrderedJson{{"id", entry.id}, {"reason", entry.reason}};
}

fs::path write_export(const LabelExport& labels, const fs::path& out) {
  dataset::save_label_file(labels.entries, out);
  fs::path sidecar = out;
  sidecar += ".unresolved.jsonl";
  if (labels.unresolved.empty()) {
    fs::remove(sidecar);
    return {};
  }
  std::string body;
  for (const auto& u : labels.unresolved) body += dump_line(unresolved_json(u)) + "\n";
  write_file_atomic(sidecar, body);
  return sidecar;
}

}  // namespace memeanno::pipeline
