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

#include "dataset/labels.hpp"

namespace memeanno::dataset {

inline constexpr std::string_view kSourceConsolidated = "consolidated";
inline constexpr std::string_view kSourceHuman = "human";

struct LabelEntry {
  std::string id;
  HateLabel label;
  std::string source;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

struct LabelFileOptions {
  // Fine-grained annotation layers may list an id more than once.
  bool allow_duplicate_ids = false;
};

std::vector<LabelEntry> load_label_file(const std::filesystem::path& path,
                                        const LabelFileOptions& options = {});

// {"id":...,"coarse":...,"fine":...,"source":...}
std::string serialize_label_line(const LabelEntry& entry);
std::string serialize_label_file(const std::vector<LabelEntry>& entries);
void save_label_file(const std::vector<LabelEntry>& entries, const std::filesystem::path& path);

}  // namespace memeanno::dataset
