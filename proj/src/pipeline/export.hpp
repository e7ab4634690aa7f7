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

#include <filesystem>
#include <string>
#include <vector>

#include "dataset/label_file.hpp"
#include "pipeline/run.hpp"
#include "service/label_journal.hpp"

namespace memeanno::pipeline {

struct UnresolvedEntry {
  std::string id;
  std::string reason;
};

struct LabelExport {
  std::string source;
  std::vector<dataset::LabelEntry> entries;  // scope order
  std::vector<UnresolvedEntry> unresolved;   // scope order
  std::vector<std::string> warnings;
};

// Sources: "consolidated", an annotator or consolidator name from the roster,
// "human" (only when a single human annotator exists) or "human:<annotator>".
// entries + unresolved always cover every meme in scope exactly once.
// Argument error for an unknown source.
LabelExport collect_labels(const RunStore& run, const std::string& source);

// Labels of one human annotator over `scope_ids`. "human" names the only
// annotator present (argument error when there are several); "human:<id>"
// picks one. No labels at all yields a warning, not an error.
LabelExport collect_human_labels(const std::vector<std::string>& scope_ids,
                                 const std::vector<service::HumanLabel>& labels,
                                 const std::string& source);

struct NamedLabels {
  std::string name;
  std::vector<dataset::LabelEntry> entries;
};

// Every annotator's successful labels, the consolidated labels (when any) and
// one layer per human annotator: "human" when there is exactly one, otherwise
// "human:<annotator>".
std::vector<NamedLabels> run_label_sources(const RunStore& run,
                                           const std::vector<service::HumanLabel>& humans);

// Writes the label file, plus "<out>.unresolved.jsonl" ({"id","reason"} per
// line) when anything is unresolved. Returns the sidecar path or empty.
std::filesystem::path write_export(const LabelExport& labels, const std::filesystem::path& out);

OrderedJson unresolved_json(const UnresolvedEntry& entry);

}  // namespace memeanno::pipeline
