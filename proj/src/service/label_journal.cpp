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

#include "service/label_journal.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "pipeline/run.hpp"

namespace memeanno::service {

namespace fs = std::filesystem;

namespace {

HumanLabel from_json(const Json& j) {
  HumanLabel h;
  h.seq = j.at("seq").get<std::uint64_t>();
  h.meme_id = j.at("id").get<std::string>();
  h.annotator = j.at("annotator").get<std::string>();
  h.label = dataset::label_from_json(j);
  h.recorded_at = j.value("recorded_at", std::string());
  if (const auto it = j.find("elapsed_s"); it != j.end() && it->is_number()) {
    h.elapsed_s = it->get<double>();
  }
  return h;
}

using LatestMap = std::map<std::pair<std::string, std::string>, HumanLabel>;

fs::path snapshot_for(const fs::path& journal) {
  fs::path p = journal;
  p += ".snapshot.json";
  return p;
}

// Snapshot state and the seq it covers; nullopt when absent or unreadable.
std::optional<std::pair<LatestMap, std::uint64_t>> read_snapshot(const fs::path& journal) {
  const auto path = snapshot_for(journal);
  if (!fs::exists(path)) return std::nullopt;
  try {
    const Json j = Json::parse(read_text_file(path));
    LatestMap latest;
    for (const auto& e : j.at("labels")) {
      HumanLabel h = from_json(e);
      latest.insert_or_assign({h.meme_id, h.annotator}, std::move(h));
    }
    return std::make_pair(std::move(latest), j.at("seq").get<std::uint64_t>());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

LatestMap replay(const fs::path& path, std::size_t* events, std::uint64_t* max_seq) {
  LatestMap latest;
  std::uint64_t covered = 0;
  if (auto snap = read_snapshot(path)) {
    latest = std::move(snap->first);
    covered = snap->second;
    if (max_seq) *max_seq = std::max(*max_seq, covered);
  }
  if (!fs::exists(path)) {
    // A snapshot without its journal is not trusted.
    return {};
  }
  for (const auto& [line, obj] : read_jsonl(path, true)) {
    HumanLabel h;
    try {
      h = from_json(obj);
    } catch (const Json::exception& e) {
      fail(ErrorKind::Schema, path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    if (events) ++*events;
    if (max_seq) *max_seq = std::max(*max_seq, h.seq);
    if (h.seq <= covered) continue;
    auto key = std::make_pair(h.meme_id, h.annotator);
    auto it = latest.find(key);
    if (it == latest.end() || it->second.seq < h.seq) latest.insert_or_assign(key, std::move(h));
  }
  return latest;
}

std::vector<HumanLabel> by_seq(const LatestMap& m) {
  std::vector<HumanLabel> out;
  out.reserve(m.size());
  for (const auto& [k, v] : m) out.push_back(v);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  return out;
}

}  // namespace

OrderedJson to_json(const HumanLabel& entry) {
  OrderedJson j;
  j["seq"] = entry.seq;
  j["id"] = entry.meme_id;
  j["annotator"] = entry.annotator;
  const OrderedJson label = dataset::to_json(entry.label);
  for (const auto& [k, v] : label.items()) j[k] = v;
  j["recorded_at"] = entry.recorded_at;
  if (entry.elapsed_s) j["elapsed_s"] = *entry.elapsed_s;
  return j;
}

LabelJournal::LabelJournal(fs::path path) : path_(std::move(path)) {
  std::uint64_t max_seq = 0;
  latest_ = replay(path_, &events_, &max_seq);
  next_seq_ = max_seq + 1;
  log_ = AppendLog(path_);
}

HumanLabel LabelJournal::append(const std::string& meme_id, const std::string& annotator,
                                const dataset::HateLabel& label, std::optional<double> elapsed_s) {
  std::lock_guard lock(mu_);
  HumanLabel h{next_seq_, meme_id, annotator, label, pipeline::utc_timestamp(), elapsed_s};
  log_.append_line(dump_line(to_json(h)));
  ++next_seq_;
  ++events_;
  latest_.insert_or_assign({meme_id, annotator}, h);
  write_snapshot();
  return h;
}

fs::path LabelJournal::snapshot_path() const { return snapshot_for(path_); }

void LabelJournal::write_snapshot() const {
  OrderedJson labels = OrderedJson::array();
  for (const auto& h : by_seq(latest_)) labels.push_back(to_json(h));
  const OrderedJson snap{{"seq", next_seq_ - 1}, {"labels", labels}};
  write_file_atomic(snapshot_path(), snap.dump() + "\n");
}

std::vector<HumanLabel> LabelJournal::latest() const {
  std::lock_guard lock(mu_);
  return by_seq(latest_);
}

std::optional<HumanLabel> LabelJournal::latest_for(const std::string& meme_id,
                                                   const std::string& annotator) const {
  std::lock_guard lock(mu_);
  const auto it = latest_.find({meme_id, annotator});
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

std::vector<HumanLabel> LabelJournal::for_meme(const std::string& meme_id) const {
  std::lock_guard lock(mu_);
  std::vector<HumanLabel> out;
  for (auto it = latest_.lower_bound({meme_id, ""}); it != latest_.end() && it->first.first == meme_id;
       ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::set<std::string> LabelJournal::annotators() const {
  std::lock_guard lock(mu_);
  std::set<std::string> out;
  for (const auto& [k, v] : latest_) out.insert(k.second);
  return out;
}

std::size_t LabelJournal::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<HumanLabel> read_human_labels(const fs::path& path) {
  return by_seq(replay(path, nullptr, nullptr));
}

}  // namespace memeanno::service
