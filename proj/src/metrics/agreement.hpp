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
#include <optional>
#include <string>
#include <vector>

#include "common/jsonl.hpp"
#include "metrics/label_vector.hpp"

namespace memeanno::metrics {

struct KappaResult {
  double kappa = 0.0;
  std::size_t n_items = 0;  // size of the id intersection
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

// Cohen's kappa over the id intersection. Argument error when the
// intersection is empty; degenerate error when chance agreement is 1 but
// observed agreement is not.
KappaResult cohen_kappa_detail(const LabelVector& a, const LabelVector& b);
inline double cohen_kappa(const LabelVector& a, const LabelVector& b) {
  return cohen_kappa_detail(a, b).kappa;
}

// ratings[i][c] = number of raters assigning class c to item i; every row
// must sum to `raters` (>= 2).
double fleiss_kappa(const std::vector<std::vector<std::int64_t>>& ratings, std::int64_t raters);

struct PairAgreement {
  std::string rater_a;
  std::string rater_b;
  std::optional<double> kappa;  // nullopt when undefined
  std::size_t n_items = 0;
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
  std::string error;
};

struct MultiRaterAgreement {
  std::vector<std::string> raters;
  std::optional<double> kappa;
  std::size_t n_items = 0;
  std::string error;
};

struct NamedVector {
  std::string name;
  LabelVector labels;
};

struct AgreementOptions {
  std::string level = "coarse";
  // Raters treated as references when grouping the rendered table.
  std::vector<std::string> human_raters = {"human", "gold"};
  std::vector<std::string> consolidator_raters = {"consolidated"};
};

struct AgreementReport {
  std::string level;
  std::vector<PairAgreement> pairs;
  std::optional<MultiRaterAgreement> multi_rater;  // Fleiss' kappa
  std::vector<std::string> notes;
  std::vector<std::string> human_raters;
  std::vector<std::string> consolidator_raters;

  bool degenerate() const;
};

// All pairwise kappas in input order, plus Fleiss' kappa when at least three
// vectors share an identical id set. Per-pair failures are recorded, not
// thrown.
AgreementReport agreement_matrix(const std::vector<NamedVector>& vectors,
                                 const AgreementOptions& options = {});

OrderedJson to_json(const AgreementReport& report);
std::string render_agreement(const Json& report);

}  // namespace memeanno::metrics
