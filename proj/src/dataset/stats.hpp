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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset/label_file.hpp"
#include "dataset/manifest.hpp"

namespace memeanno::dataset {

using LabelIndex = std::unordered_map<std::string, HateLabel>;

// Requires unique ids.
LabelIndex index_labels(const std::vector<LabelEntry>& entries);

struct SplitCounts {
  std::int64_t records = 0;
  std::int64_t unlabeled = 0;
  std::array<std::int64_t, 2> coarse{};  // indexed by CoarseLabel
  std::array<std::int64_t, 11> fine{};   // indexed by FineLabel
  std::int64_t fine_entries = 0;

  std::int64_t coarse_total() const { return coarse[0] + coarse[1]; }
  std::int64_t fine_family_total(CoarseLabel family) const;
};

// Bucket names: "train", "dev", "test", and "unassigned" for records without
// a split.
struct DistributionReport {
  std::vector<std::string> buckets;
  std::map<std::string, SplitCounts> per_split;
  std::vector<std::string> warnings;
};

// Coarse counts come from `coarse_layer`. Fine counts come from `fine_layer`
// when given (each line counted, repeated ids allowed), otherwise from the fine
// field of the coarse layer. Coarse-vs-fine inconsistencies are reported as
// warnings, never resolved.
DistributionReport distribution(const Manifest& manifest, const std::vector<LabelEntry>& coarse_layer,
                                const std::vector<LabelEntry>* fine_layer = nullptr);

struct CrossTab {
  std::string scope;  // split token or "all"
  // counts[propaganda][coarse]
  std::array<std::array<std::int64_t, 2>, 2> counts{};
  std::int64_t excluded_unlabeled = 0;

  std::int64_t row_total(Propaganda p) const;
  std::int64_t column_total(CoarseLabel c) const;
  std::int64_t total() const;
  // count(prop & hateful) / count(prop); nullopt when no propagandistic records.
  std::optional<double> hateful_share() const;
};

CrossTab crosstab(const Manifest& manifest, const LabelIndex& labels, std::optional<Split> split);

// weight(c) = N / (K * N_c). Zero counts are argument errors naming the class.
std::map<std::string, double> class_weights(const std::map<std::string, std::int64_t>& counts);

OrderedJson to_json(const DistributionReport& report);
OrderedJson to_json(const CrossTab& table);

// Full `stats` report; rendered tables are produced from this JSON only, so a
// re-read report renders identically.
OrderedJson stats_report(const Manifest& manifest, const std::vector<LabelEntry>& coarse_layer,
                         const std::vector<LabelEntry>* fine_layer,
                         std::optional<Split> crosstab_split);
std::string render_stats(const Json& report);

OrderedJson ingest_report(const Manifest& manifest, bool images_checked);
std::string render_ingest(const Json& report);

}  // namespace memeanno::dataset
