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

#include "metrics/reports.hpp"

#include "common/error.hpp"
#include "dataset/stats.hpp"
#include "metrics/agreement.hpp"
#include "metrics/evaluation.hpp"

namespace memeanno::metrics {

using dataset::CoarseLabel;

std::optional<Level> parse_level(std::string_view raw) {
  for (Level l : {Level::Coarse, Level::Fine, Level::FineHateful, Level::FineNotHateful}) {
    if (raw == token(l)) return l;
  }
  return std::nullopt;
}

std::string_view token(Level level) noexcept {
  switch (level) {
    case Level::Coarse: return "coarse";
    case Level::Fine: return "fine";
    case Level::FineHateful: return "fine-hateful";
    case Level::FineNotHateful: return "fine-not-hateful";
  }
  return "";
}

std::vector<std::string> alphabet_for(Level level) {
  std::vector<std::string> out;
  if (level == Level::Coarse) {
    for (auto c : dataset::kCoarseLabels) out.emplace_back(dataset::token(c));
  } else {
    for (auto f : dataset::kFineLabels) out.emplace_back(dataset::token(f));
  }
  return out;
}

BuiltVector to_label_vector(const std::vector<dataset::LabelEntry>& entries, Level level,
                            bool restrict_family) {
  std::vector<std::pair<std::string, std::string>> items;
  std::size_t skipped = 0;
  for (const auto& e : entries) {
    if (level == Level::Coarse) {
      items.emplace_back(e.id, dataset::token(e.label.coarse()));
      continue;
    }
    const bool wrong_family =
        restrict_family &&
        ((level == Level::FineHateful && e.label.coarse() != CoarseLabel::Hateful) ||
         (level == Level::FineNotHateful && e.label.coarse() != CoarseLabel::NotHateful));
    if (!e.label.fine() || wrong_family) {
      ++skipped;
      continue;
    }
    items.emplace_back(e.id, dataset::token(*e.label.fine()));
  }
  return {LabelVector(alphabet_for(level), std::move(items)), skipped};
}

std::string render_report(const Json& report) {
  const auto kind = report.value("kind", std::string());
  if (kind == "stats") return dataset::render_stats(report);
  if (kind == "ingest") return dataset::render_ingest(report);
  if (kind == "agreement") return render_agreement(report);
  if (kind == "evaluation") return render_evaluation(report);
  fail(ErrorKind::Schema, "unknown report kind \"" + kind + "\"");
}

}  // namespace memeanno::metrics
