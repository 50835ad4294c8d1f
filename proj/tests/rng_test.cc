/*
 * Copyright 2026 The HelpRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "helprank/rng.h"

namespace helprank {
namespace {

TEST(RngTest, KnownOutputs) {
  Xoshiro256 a(0);
  EXPECT_EQ(a.Next(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(a.Next(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(a.Next(), 0x1a5f849d4933e6e0ULL);
  Xoshiro256 b(12345);
  EXPECT_EQ(b.Next(), 0xbe6a36374160d49bULL);
  EXPECT_EQ(b.Next(), 0x214aaa0637a688c6ULL);
  EXPECT_EQ(b.Next(), 0xf69d16de9954d388ULL);
}

TEST(RngTest, BelowStaysInRangeAndCoversIt) {
  Xoshiro256 rng(3);
  std::array<int, 7> seen{};
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = rng.Below(7);
    ASSERT_LT(v, 7u);
    ++seen[v];
  }
  for (int c : seen) EXPECT_GT(c, 800);
}

TEST(RngTest, UniformInUnitInterval) {
  Xoshiro256 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngTest, ShuffleIsAPermutation) {
  Xoshiro256 rng(9);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  rng.Shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(RngTest, DerivedStreamsDiffer) {
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
  EXPECT_EQ(DeriveSeed(7, 3), DeriveSeed(7, 3));
}

}  // namespace
}  // namespace helprank
