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

#include "dataset/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common/error.hpp"

namespace memeanno::dataset {

namespace {

void check_ratios(const SplitRatios& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) fail(ErrorKind::Argument, "split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(ErrorKind::Argument, "split ratios must sum to 1");
}

// Uniform in [0, bound) by rejection; bound > 0.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

}  // namespace

std::array<std::size_t, 3> largest_remainder(std::size_t n, const SplitRatios& ratios) {
  check_ratios(ratios);
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    double quota = ratios[i] * static_cast<double>(n);
    // Snap products like 0.7 * 1200 = 839.999... onto the integer they represent.
    if (std::abs(quota - std::round(quota)) < 1e-9 * std::max(1.0, quota)) quota = std::round(quota);
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

std::vector<MemeRecord> stratified_split(std::vector<MemeRecord> records, const SplitRatios& ratios,
                                         std::uint64_t seed) {
  check_ratios(ratios);
  if (records.empty()) fail(ErrorKind::Argument, "cannot split an empty record set");

  std::mt19937_64 rng(seed);
  for (Propaganda stratum : {Propaganda::Propagandistic, Propaganda::NotPropagandistic}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].propaganda == stratum) members.push_back(i);
    }
    if (members.empty()) continue;

    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[draw_below(rng, i + 1)]);
    }
    const auto sizes = largest_remainder(members.size(), ratios);
    std::size_t cursor = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < sizes[s]; ++k) records[members[cursor++]].split = kSplits[s];
    }
  }
  return records;
}

}  // namespace memeanno::dataset
