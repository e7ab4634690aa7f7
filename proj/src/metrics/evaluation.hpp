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
#include <string>
#include <vector>

#include "common/jsonl.hpp"
#include "metrics/label_vector.hpp"

namespace memeanno::metrics {

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;    // gold count
  std::int64_t predicted = 0;  // prediction count
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // Classes present in gold or predictions, in alphabet order. Rows are gold,
  // columns are predictions.
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<ClassScore> per_class;
  std::size_t ignored_predictions = 0;  // predictions for ids outside gold
};

// Scores `pred` against `gold` over the gold ids. Missing predictions are an
// argument error listing the ids; prediction tokens outside the gold
// alphabet are schema errors. 0/0 precision, recall or F1 count as 0.
EvalReport evaluate(const LabelVector& gold, const LabelVector& pred);

OrderedJson to_json(const EvalReport& report, const std::string& level);
std::string render_evaluation(const Json& report);

}  // namespace memeanno::metrics
