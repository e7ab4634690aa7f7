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
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dataset/manifest.hpp"

namespace memeanno::dataset {

// Proportions for train/dev/test, in that order.
using SplitRatios = std::array<double, 3>;

inline constexpr SplitRatios kDefaultRatios = {0.7, 0.1, 0.2};

// Integer sizes summing to n. Each size is floor(ratio * n) plus one extra
// unit for the largest fractional remainders (ties go to the earlier split).
std::array<std::size_t, 3> largest_remainder(std::size_t n, const SplitRatios& ratios);

// Assigns every record a split, stratified on the propaganda label. The
// shuffle uses mt19937_64 with an explicit bounded draw, so assignments are
// reproducible across standard libraries.
std::vector<MemeRecord> stratified_split(std::vector<MemeRecord> records, const SplitRatios& ratios,
                                         std::uint64_t seed);

}  // namespace memeanno::dataset
