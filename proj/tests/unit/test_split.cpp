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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "common/error.hpp"
#include "dataset/split.hpp"

namespace memeanno::dataset {
namespace {

std::vector<MemeRecord> records(std::size_t n, std::size_t propagandistic) {
  std::vector<MemeRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    MemeRecord r;
    r.id = "r" + std::to_string(i);
    r.image_path = r.id + ".png";
    r.propaganda = i < propagandistic ? Propaganda::Propagandistic : Propaganda::NotPropagandistic;
    out.push_back(r);
  }
  return out;
}

std::map<std::pair<Split, Propaganda>, std::size_t> tally(const std::vector<MemeRecord>& rs) {
  std::map<std::pair<Split, Propaganda>, std::size_t> t;
  for (const auto& r : rs) ++t[{*r.split, r.propaganda}];
  return t;
}

TEST(LargestRemainder, ExactWhenQuotasAreIntegers) {
  EXPECT_EQ(largest_remainder(3000, kDefaultRatios), (std::array<std::size_t, 3>{2100, 300, 600}));
  EXPECT_EQ(largest_remainder(1200, kDefaultRatios), (std::array<std::size_t, 3>{840, 120, 240}));
  EXPECT_EQ(largest_remainder(0, kDefaultRatios), (std::array<std::size_t, 3>{0, 0, 0}));
}

TEST(LargestRemainder, RemaindersGoToLargestFractionsThenEarlierSplits) {
  // 7 * (0.7, 0.1, 0.2) = (4.9, 0.7, 1.4): floors 4,0,1; two extra units to
  // the 0.9 and 0.7 remainders.
  EXPECT_EQ(largest_remainder(7, kDefaultRatios), (std::array<std::size_t, 3>{5, 1, 1}));
  // Equal thirds of 4: one extra unit, tie broken toward train.
  EXPECT_EQ(largest_remainder(4, {1.0 / 3, 1.0 / 3, 1.0 / 3}), (std::array<std::size_t, 3>{2, 1, 1}));
}

TEST(LargestRemainder, PropertySumsAndStaysWithinOneOfTheQuota) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = rng() % 5000;
    const double a = 1 + rng() % 100, b = 1 + rng() % 100, c = 1 + rng() % 100;
    const SplitRatios ratios{a / (a + b + c), b / (a + b + c), 1 - a / (a + b + c) - b / (a + b + c)};
    if (ratios[2] <= 0) continue;
    const auto sizes = largest_remainder(n, ratios);
    EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], n);
    for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(double(sizes[k]) - ratios[k] * double(n)), 1.0);
  }
}

TEST(LargestRemainder, RejectsBadRatios) {
  EXPECT_THROW(largest_remainder(10, {0.5, 0.5, 0.0}), Error);
  EXPECT_THROW(largest_remainder(10, {0.7, 0.1, 0.1}), Error);
  EXPECT_THROW(largest_remainder(10, {-0.1, 0.6, 0.5}), Error);
}

TEST(StratifiedSplit, ThreeThousandRecords) {
  const auto out = stratified_split(records(3000, 1200), kDefaultRatios, 13);
  auto t = tally(out);
  EXPECT_EQ((t[{Split::Train, Propaganda::Propagandistic}]), 840u);
  EXPECT_EQ((t[{Split::Dev, Propaganda::Propagandistic}]), 120u);
  EXPECT_EQ((t[{Split::Test, Propaganda::Propagandistic}]), 240u);
  EXPECT_EQ((t[{Split::Train, Propaganda::NotPropagandistic}]), 1260u);
  EXPECT_EQ((t[{Split::Dev, Propaganda::NotPropagandistic}]), 180u);
  EXPECT_EQ((t[{Split::Test, Propaganda::NotPropagandistic}]), 360u);
}

TEST(StratifiedSplit, DeterministicPerSeed) {
  const auto a = stratified_split(records(500, 170), kDefaultRatios, 42);
  const auto b = stratified_split(records(500, 170), kDefaultRatios, 42);
  const auto c = stratified_split(records(500, 170), kDefaultRatios, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(StratifiedSplit, KeepsEveryRecordAndOverwritesOldSplits) {
  auto in = records(101, 33);
  for (auto& r : in) r.split = Split::Test;
  const auto out = stratified_split(in, kDefaultRatios, 1);
  ASSERT_EQ(out.size(), in.size());
  std::set<std::string> ids;
  for (const auto& r : out) {
    ASSERT_TRUE(r.split.has_value());
    ids.insert(r.id);
  }
  EXPECT_EQ(ids.size(), in.size());
  const auto t = tally(out);
  std::size_t train = 0;
  for (const auto& [k, v] : t) {
    if (k.first == Split::Train) train += v;
  }
  EXPECT_GT(train, 60u);
}

TEST(StratifiedSplit, PropertyPerStratumCountsFollowLargestRemainder) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    const std::size_t p = rng() % (n + 1);
    const auto out = stratified_split(records(n, p), kDefaultRatios, rng());
    auto t = tally(out);
    const auto want_p = largest_remainder(p, kDefaultRatios);
    const auto want_n = largest_remainder(n - p, kDefaultRatios);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ((t[{kSplits[k], Propaganda::Propagandistic}]), want_p[k]);
      EXPECT_EQ((t[{kSplits[k], Propaganda::NotPropagandistic}]), want_n[k]);
    }
  }
}

TEST(StratifiedSplit, EmptyInputIsAnError) {
  EXPECT_THROW(stratified_split({}, kDefaultRatios, 1), Error);
}

}  // namespace
}  // namespace memeanno::dataset
