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
#include <optional>
#include <string>
#include <string_view>

#include "common/jsonl.hpp"

namespace memeanno::dataset {

enum class CoarseLabel { Hateful, NotHateful };

// Two disjoint families. "Other" exists in both, so it is split into two
// tokens to keep every fine label mapped to exactly one coarse label.
enum class FineLabel {
  Dehumanizing,
  Inferiority,
  IncitingViolence,
  Mocking,
  Contempt,
  Slurs,
  Exclusion,
  OtherHateful,
  Humor,
  Sarcasm,
  OtherNotHateful,
};

inline constexpr std::array<CoarseLabel, 2> kCoarseLabels = {CoarseLabel::Hateful,
                                                             CoarseLabel::NotHateful};

inline constexpr std::array<FineLabel, 8> kHatefulFamily = {
    FineLabel::Dehumanizing, FineLabel::Inferiority, FineLabel::IncitingViolence,
    FineLabel::Mocking,      FineLabel::Contempt,    FineLabel::Slurs,
    FineLabel::Exclusion,    FineLabel::OtherHateful,
};

inline constexpr std::array<FineLabel, 3> kNotHatefulFamily = {
    FineLabel::Humor, FineLabel::Sarcasm, FineLabel::OtherNotHateful};

inline constexpr std::array<FineLabel, 11> kFineLabels = {
    FineLabel::Dehumanizing, FineLabel::Inferiority, FineLabel::IncitingViolence,
    FineLabel::Mocking,      FineLabel::Contempt,    FineLabel::Slurs,
    FineLabel::Exclusion,    FineLabel::OtherHateful, FineLabel::Humor,
    FineLabel::Sarcasm,      FineLabel::OtherNotHateful,
};

constexpr CoarseLabel family(FineLabel fine) noexcept {
  switch (fine) {
    case FineLabel::Humor:
    case FineLabel::Sarcasm:
    case FineLabel::OtherNotHateful:
      return CoarseLabel::NotHateful;
    default:
      return CoarseLabel::Hateful;
  }
}

std::string_view token(CoarseLabel label) noexcept;
std::string_view token(FineLabel label) noexcept;
// Human-facing names ("Not-Hateful", "Inciting violence", "Other").
std::string_view display_name(CoarseLabel label) noexcept;
std::string_view display_name(FineLabel label) noexcept;
// Guideline definition text shown to annotators (human or agent).
std::string_view definition(CoarseLabel label) noexcept;
std::string_view definition(FineLabel label) noexcept;

// Lowercases and folds '-' and ' ' to '_'.
std::string normalize_token(std::string_view raw);

std::optional<CoarseLabel> parse_coarse(std::string_view raw);
// A bare "other" resolves through `family_hint`; explicit tokens are returned
// as-is even when they belong to the other family.
std::optional<FineLabel> parse_fine(std::string_view raw, CoarseLabel family_hint);

class HateLabel {
 public:
  explicit HateLabel(CoarseLabel coarse) : coarse_(coarse) {}
  // Throws a schema error when family(fine) != coarse.
  HateLabel(CoarseLabel coarse, std::optional<FineLabel> fine);

  static std::optional<HateLabel> try_make(CoarseLabel coarse, std::optional<FineLabel> fine);

  CoarseLabel coarse() const noexcept { return coarse_; }
  const std::optional<FineLabel>& fine() const noexcept { return fine_; }

  friend bool operator==(const HateLabel&, const HateLabel&) = default;

 private:
  CoarseLabel coarse_;
  std::optional<FineLabel> fine_;
};

// "hateful/mocking", "not_hateful"
std::string describe(const HateLabel& label);

// Tokens -> label. Unknown tokens and cross-family pairs are schema errors.
HateLabel label_from_tokens(std::string_view coarse, std::optional<std::string_view> fine);

// {"coarse": ..., "fine": ...}; fine omitted when absent.
OrderedJson to_json(const HateLabel& label);
HateLabel label_from_json(const Json& object);

enum class Propaganda { Propagandistic, NotPropagandistic };
enum class Split { Train, Dev, Test };

inline constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Dev, Split::Test};

std::string_view token(Propaganda value) noexcept;
std::string_view token(Split value) noexcept;
std::optional<Propaganda> parse_propaganda(std::string_view raw);
std::optional<Split> parse_split(std::string_view raw);

}  // namespace memeanno::dataset
