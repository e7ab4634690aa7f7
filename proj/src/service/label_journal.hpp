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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common/jsonl.hpp"
#include "dataset/labels.hpp"

namespace memeanno::service {

struct HumanLabel {
  std::uint64_t seq = 0;
  std::string meme_id;
  std::string annotator;
  dataset::HateLabel label{dataset::CoarseLabel::NotHateful};
  std::string recorded_at;
  std::optional<double> elapsed_s;  // time spent on the item, client-reported
};

OrderedJson to_json(const HumanLabel& entry);

// Event journal of human label submissions ({"seq", "id", "annotator",
// "coarse", "fine"?, "recorded_at", "elapsed_s"?} per line). A resubmission
// for the same (meme, annotator) supersedes the earlier one; the journal keeps
// the full history and seq is strictly increasing.
//
// "<journal>.snapshot.json" holds the current state up to some seq and is
// refreshed after each append; on open only later journal events are
// replayed over it. The journal stays authoritative: a missing or unreadable
// snapshot means a full replay.
class LabelJournal {
 public:
  explicit LabelJournal(std::filesystem::path path);

  // Durable (fsync'ed) before it returns.
  HumanLabel append(const std::string& meme_id, const std::string& annotator,
                    const dataset::HateLabel& label,
                    std::optional<double> elapsed_s = std::nullopt);

  // Latest entry per (meme, annotator), ordered by seq.
  std::vector<HumanLabel> latest() const;
  std::optional<HumanLabel> latest_for(const std::string& meme_id,
                                       const std::string& annotator) const;
  std::vector<HumanLabel> for_meme(const std::string& meme_id) const;
  std::set<std::string> annotators() const;
  std::size_t events() const;
  std::filesystem::path snapshot_path() const;

 private:
  void write_snapshot() const;

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, HumanLabel> latest_;
  std::uint64_t next_seq_ = 1;
  std::size_t events_ = 0;
  AppendLog log_;
};

// Read-only view of a journal; a missing file yields no labels.
std::vector<HumanLabel> read_human_labels(const std::filesystem::path& path);

}  // namespace memeanno::service
