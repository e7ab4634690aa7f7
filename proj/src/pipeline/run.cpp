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

#include "pipeline/run.hpp"

#include <chrono>
#include <ctime>
#include <random>

#include "common/error.hpp"

namespace memeanno::pipeline {

namespace fs = std::filesystem;
using agents::AgentResponse;

std::string_view token(ConsolidationMethod method) noexcept {
  switch (method) {
    case ConsolidationMethod::LlmConsolidator: return "llm_consolidator";
    case ConsolidationMethod::MajorityVote: return "majority_vote";
    case ConsolidationMethod::Unresolved: return "unresolved";
  }
  return "";
}

namespace {

std::optional<ConsolidationMethod> parse_method(std::string_view raw) {
  for (auto m : {ConsolidationMethod::LlmConsolidator, ConsolidationMethod::MajorityVote,
                 ConsolidationMethod::Unresolved}) {
    if (raw == token(m)) return m;
  }
  return std::nullopt;
}

OrderedJson roster_json(const RosterEntry& e) {
  return OrderedJson{{"name", e.name}, {"model_id", e.model_id}};
}

RosterEntry roster_from(const Json& j) {
  return {j.at("name").get<std::string>(), j.at("model_id").get<std::string>()};
}

std::string random_suffix() {
  std::random_device rd;
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", rd());
  return buf;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool MemeState::annotated() const {
  for (const auto& a : annotations) {
    if (!a) return false;
  }
  return true;
}

std::vector<dataset::HateLabel> MemeState::successful_labels() const {
  std::vector<dataset::HateLabel> out;
  for (const auto& a : annotations) {
    if (a && a->ok()) out.push_back(*a->parsed);
  }
  return out;
}

RunStore::RunStore(fs::path dir, const dataset::Manifest& manifest, RunMetadata meta)
    : dir_(std::move(dir)), meta_(std::move(meta)) {
  for (const auto& r : manifest.records()) {
    if (meta_.split && r.split != meta_.split) continue;
    index_.emplace(r.id, memes_.size());
    MemeState m;
    m.meme_id = r.id;
    m.annotations.resize(meta_.annotators.size());
    memes_.push_back(std::move(m));
  }
}

RunMetadata RunStore::read_metadata(const fs::path& dir) {
  const auto path = dir / kRunFile;
  if (!fs::exists(path)) fail(ErrorKind::Argument, dir.string() + " does not contain a run");
  Json j;
  try {
    j = Json::parse(read_text_file(path));
    RunMetadata m;
    m.run_id = j.at("run_id").get<std::string>();
    m.manifest_path = j.at("manifest_path").get<std::string>();
    m.manifest_digest = j.at("manifest_digest").get<std::string>();
    if (const auto& s = j.at("split"); !s.is_null()) m.split = dataset::parse_split(s.get<std::string>());
    for (const auto& a : j.at("annotators")) m.annotators.push_back(roster_from(a));
    if (const auto& c = j.at("consolidator"); !c.is_null()) m.consolidator = roster_from(c);
    m.created_at = j.at("created_at").get<std::string>();
    m.updated_at = j.at("updated_at").get<std::string>();
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": malformed run state (" + e.what() + ")");
  }
}

RunStore RunStore::open(const fs::path& dir, const dataset::Manifest& manifest, RunMetadata meta,
                        OpenMode mode) {
  const bool exists = fs::exists(dir / kRunFile);
  if (exists && mode == OpenMode::Create) {
    fail(ErrorKind::Argument,
         dir.string() + " already holds a run; pass --resume to continue or --force to restart");
  }
  if (!exists && fs::exists(dir) && !fs::is_empty(dir) && mode == OpenMode::Create) {
    fail(ErrorKind::Argument, dir.string() + " exists and is not empty");
  }

  if (exists && mode == OpenMode::Resume) {
    RunMetadata stored = read_metadata(dir);
    if (stored.manifest_digest != manifest.digest()) {
      fail(ErrorKind::Config, "manifest changed since the run started (digest mismatch)");
    }
    if (stored.annotators != meta.annotators) {
      fail(ErrorKind::Config, "annotator roster differs from the one recorded in " +
                                  (dir / kRunFile).string());
    }
    if (stored.split != meta.split) fail(ErrorKind::Config, "split filter differs from the recorded run");
    RunStore store(dir, manifest, std::move(stored));
    store.replay();
    store.open_logs();
    return store;
  }

  if (exists) {
    for (const char* f : {kRunFile, kResponsesFile, kConsolidationFile, kFailuresFile,
                          kConsolidatedLabelsFile}) {
      fs::remove(dir / f);
    }
  }

  meta.run_id = "run-" + utc_timestamp() + "-" + random_suffix();
  meta.manifest_digest = manifest.digest();
  meta.created_at = meta.updated_at = utc_timestamp();

  if (!fs::exists(dir)) {
    // Build the directory next to its final location, then rename it in.
    const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
    fs::create_directories(parent);
    const fs::path tmp = parent / ("." + dir.filename().string() + ".tmp-" + random_suffix());
    fs::create_directory(tmp);
    RunStore staging(tmp, manifest, meta);
    staging.save_state();
    std::error_code ec;
    fs::rename(tmp, dir, ec);
    if (ec) {
      fs::remove_all(tmp);
      fail(ErrorKind::Io, "cannot create run directory " + dir.string() + ": " + ec.message());
    }
  }
  RunStore store(dir, manifest, std::move(meta));
  store.save_state();
  store.open_logs();
  return store;
}

RunStore RunStore::load(const fs::path& dir, const dataset::Manifest& manifest) {
  RunMetadata meta = read_metadata(dir);
  if (!manifest.digest().empty() && meta.manifest_digest != manifest.digest()) {
    fail(ErrorKind::Config, "manifest does not match the run (digest mismatch)");
  }
  RunStore store(dir, manifest, std::move(meta));
  store.replay();
  return store;
}

void RunStore::open_logs() {
  responses_log_ = AppendLog(dir_ / kResponsesFile);
  consolidation_log_ = AppendLog(dir_ / kConsolidationFile);
  failures_log_ = AppendLog(dir_ / kFailuresFile);
}

void RunStore::replay() {
  std::unordered_map<std::string, std::size_t> annotator_slot;
  for (std::size_t i = 0; i < meta_.annotators.size(); ++i) annotator_slot[meta_.annotators[i].name] = i;

  if (fs::exists(dir_ / kResponsesFile)) {
    for (const auto& [line, obj] : read_jsonl(dir_ / kResponsesFile, true)) {
      if (obj.value("phase", "") != "annotation") continue;
      AgentResponse r = agents::response_from_json(obj.at("response"));
      const auto m = index_.find(r.meme_id);
      const auto a = annotator_slot.find(r.agent_name);
      if (m == index_.end() || a == annotator_slot.end()) continue;
      memes_[m->second].annotations[a->second] = std::move(r);
    }
  }
  if (fs::exists(dir_ / kConsolidationFile)) {
    for (const auto& [line, obj] : read_jsonl(dir_ / kConsolidationFile, true)) {
      const auto m = index_.find(obj.at("id").get<std::string>());
      if (m == index_.end()) continue;
      auto& meme = memes_[m->second];
      meme.method = parse_method(obj.at("method").get<std::string>());
      meme.consolidated.reset();
      if (const auto& l = obj.at("label"); !l.is_null()) meme.consolidated = dataset::label_from_json(l);
      meme.consolidator_response.reset();
      if (const auto& c = obj.at("consolidator_response"); !c.is_null())
        meme.consolidator_response = agents::response_from_json(c);
    }
  }
  if (fs::exists(dir_ / kFailuresFile)) {
    for (const auto& [line, obj] : read_jsonl(dir_ / kFailuresFile, true)) {
      failures_.push_back({obj.at("meme_id").get<std::string>(), obj.at("agent_name").get<std::string>(),
                           obj.at("phase").get<std::string>(), obj.at("status").get<std::string>(),
                           obj.value("message", std::string())});
    }
  }
}

const MemeState* RunStore::find(const std::string& meme_id) const {
  const auto it = index_.find(meme_id);
  return it == index_.end() ? nullptr : &memes_[it->second];
}

std::size_t RunStore::index_of(const std::string& meme_id) const {
  const auto it = index_.find(meme_id);
  if (it == index_.end()) fail(ErrorKind::Argument, "meme \"" + meme_id + "\" is not in the run");
  return it->second;
}

void RunStore::record_annotation(std::size_t meme_index, std::size_t annotator_index,
                                 const AgentResponse& response) {
  OrderedJson line;
  line["phase"] = "annotation";
  line["response"] = agents::to_json(response);
  responses_log_.append_line(dump_line(line));
  if (!response.ok()) {
    FailureRecord f{response.meme_id, response.agent_name, "annotation",
                    std::string(agents::token(response.status)), response.error};
    failures_log_.append_line(dump_line(OrderedJson{{"meme_id", f.meme_id},
                                                    {"agent_name", f.agent_name},
                                                    {"phase", f.phase},
                                                    {"status", f.status},
                                                    {"message", f.message}}));
    failures_.push_back(std::move(f));
  }
  memes_.at(meme_index).annotations.at(annotator_index) = response;
}

void RunStore::set_consolidator(const RosterEntry& consolidator) {
  meta_.consolidator = consolidator;
  save_state();
}

void RunStore::reset_consolidation() {
  for (auto& m : memes_) {
    m.consolidated.reset();
    m.method.reset();
    m.consolidator_response.reset();
  }
}

void RunStore::record_consolidation(std::size_t meme_index, std::optional<dataset::HateLabel> label,
                                    ConsolidationMethod method,
                                    const std::optional<AgentResponse>& consolidator_response) {
  auto& meme = memes_.at(meme_index);
  if (consolidator_response) {
    OrderedJson line;
    line["phase"] = "consolidation";
    line["response"] = agents::to_json(*consolidator_response);
    responses_log_.append_line(dump_line(line));
    if (!consolidator_response->ok()) {
      FailureRecord f{meme.meme_id, consolidator_response->agent_name, "consolidation",
                      std::string(agents::token(consolidator_response->status)),
                      consolidator_response->error};
      failures_log_.append_line(dump_line(OrderedJson{{"meme_id", f.meme_id},
                                                      {"agent_name", f.agent_name},
                                                      {"phase", f.phase},
                                                      {"status", f.status},
                                                      {"message", f.message}}));
      failures_.push_back(std::move(f));
    }
  }
  meme.consolidated = label;
  meme.method = method;
  meme.consolidator_response = consolidator_response;
  OrderedJson line;
  line["id"] = meme.meme_id;
  line["label"] = label ? dataset::to_json(*label) : OrderedJson(nullptr);
  line["method"] = token(method);
  line["consolidator_response"] =
      consolidator_response ? agents::to_json(*consolidator_response) : OrderedJson(nullptr);
  consolidation_log_.append_line(dump_line(line));
}

void RunStore::compact_consolidation() {
  std::string out;
  for (const auto& m : memes_) {
    if (!m.method) continue;
    OrderedJson line;
    line["id"] = m.meme_id;
    line["label"] = m.consolidated ? dataset::to_json(*m.consolidated) : OrderedJson(nullptr);
    line["method"] = token(*m.method);
    line["consolidator_response"] =
        m.consolidator_response ? agents::to_json(*m.consolidator_response) : OrderedJson(nullptr);
    out += dump_line(line);
    out += '\n';
  }
  const bool reopen = consolidation_log_.is_open();
  consolidation_log_ = AppendLog();
  write_file_atomic(dir_ / kConsolidationFile, out);
  if (reopen) consolidation_log_ = AppendLog(dir_ / kConsolidationFile);
}

void RunStore::save_state() {
  meta_.updated_at = utc_timestamp();
  std::size_t annotated = 0, consolidated = 0, unresolved = 0;
  for (const auto& m : memes_) {
    if (m.annotated()) ++annotated;
    if (m.consolidated) ++consolidated;
    if (m.method == ConsolidationMethod::Unresolved) ++unresolved;
  }
  OrderedJson j;
  j["run_id"] = meta_.run_id;
  j["manifest_path"] = meta_.manifest_path;
  j["manifest_digest"] = meta_.manifest_digest;
  j["split"] = meta_.split ? OrderedJson(dataset::token(*meta_.split)) : OrderedJson(nullptr);
  OrderedJson roster = OrderedJson::array();
  for (const auto& a : meta_.annotators) roster.push_back(roster_json(a));
  j["annotators"] = roster;
  j["consolidator"] = meta_.consolidator ? roster_json(*meta_.consolidator) : OrderedJson(nullptr);
  j["created_at"] = meta_.created_at;
  j["updated_at"] = meta_.updated_at;
  j["progress"] = {{"memes", memes_.size()},
                   {"annotated", annotated},
                   {"consolidated", consolidated},
                   {"unresolved", unresolved},
                   {"failures", failures_.size()}};
  write_file_atomic(dir_ / kRunFile, j.dump(2) + "\n");
}

}  // namespace memeanno::pipeline
