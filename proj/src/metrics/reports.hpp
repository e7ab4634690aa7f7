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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dataset/label_file.hpp"
#include "metrics/label_vector.hpp"

namespace memeanno::metrics {

// Which label a vector is built from:
//   coarse            hateful / not_hateful
//   fine              all 11 fine tokens
//   fine-hateful      fine tokens, items restricted to coarse hateful
//   fine-not-hateful  fine tokens, items restricted to coarse not_hateful
enum class Level { Coarse, Fine, FineHateful, FineNotHateful };

std::optional<Level> parse_level(std::string_view raw);
std::string_view token(Level level) noexcept;
std::vector<std::string> alphabet_for(Level level);

struct BuiltVector {
  LabelVector labels;
  std::size_t skipped = 0;  // entries without the requested label or outside the family
};

// `restrict_family` applies the fine-hateful / fine-not-hateful item filter;
// prediction vectors are built without it.
BuiltVector to_label_vector(const std::vector<dataset::LabelEntry>& entries, Level level,
                            bool restrict_family = true);

// Renders any report JSON written by this library, dispatching on "kind".
std::string render_report(const Json& report);

}  // namespace memeanno::metrics
