//
// Copyright 2026 The gazedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gazedp/gaze_map.hpp"

#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gazedp {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(GridSpecTest, RejectsEmptyDimensions) {
  EXPECT_THROW(GridSpec(0, 3), Error);
  EXPECT_THROW(GridSpec(3, 0), Error);
  const GridSpec g(4, 3);
  EXPECT_EQ(g.pixels(), 12u);
  EXPECT_EQ(g.Index(1, 2), 9u);
}

TEST(RasterizeFixationsTest, EmptyInputGivesZeroMap) {
  const GazeMap map = RasterizeFixations({}, GridSpec(2, 2));
  EXPECT_THAT(testing::Vec(map.counts()), ElementsAre(0, 0, 0, 0));
}

TEST(RasterizeFixationsTest, SingleWeightedFixation) {
  const std::vector<Fixation> f = {{0.5, 0.5, 3}};
  EXPECT_THAT(testing::Vec(RasterizeFixations(f, GridSpec(2, 2)).counts()),
              ElementsAre(3, 0, 0, 0));
}

TEST(RasterizeFixationsTest, FloorsCoordinatesRowMajor) {
  const std::vector<Fixation> f = {{1.99, 0.0, 1}, {0.0, 1.5, 2}, {1.0, 1.0, 1}};
  EXPECT_THAT(testing::Vec(RasterizeFixations(f, GridSpec(2, 2)).counts()),
              ElementsAre(0, 1, 2, 1));
}

TEST(RasterizeFixationsTest, ConservesTotalCount) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0, 37), uy(0, 23);
  std::vector<Fixation> f(1000);
  for (auto& fx : f) fx = {ux(rng), uy(rng), 1};
  EXPECT_EQ(RasterizeFixations(f, GridSpec(37, 23)).Total(), 1000u);
}

TEST(RasterizeFixationsTest, ReportsOffendingIndex) {
  const std::vector<Fixation> f = {{0.5, 0.5, 1}, {0.5, 0.5, 1}, {2.0, 0.5, 1}};
  try {
    RasterizeFixations(f, GridSpec(2, 2));
    FAIL() << "expected out-of-bounds error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    EXPECT_THAT(e.what(), HasSubstr("fixation 2"));
  }
  const std::vector<Fixation> negative = {{-0.1, 0.0, 1}};
  EXPECT_THROW(RasterizeFixations(negative, GridSpec(2, 2)), Error);
}

TEST(CapGazeMapTest, PointwiseMin) {
  const GazeMap g(GridSpec(3, 1), {0, 5, 2});
  EXPECT_THAT(testing::Vec(CapGazeMap(g, 3).counts()), ElementsAre(0, 3, 2));
}

TEST(CapGazeMapTest, IdentityWhenAlreadyBelowCap) {
  std::mt19937_64 rng(3);
  const GazeMap g = testing::RandomGazeMap(rng, GridSpec(8, 8), 4);
  EXPECT_EQ(CapGazeMap(g, 4), g);
  EXPECT_EQ(CapGazeMap(g, 100), g);
}

TEST(CapGazeMapTest, CapOneIsTheIndicatorMap) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const GazeMap g = testing::RandomGazeMap(rng, GridSpec(9, 7), 9);
    const GazeMap capped = CapGazeMap(g, 1);
    for (std::size_t p = 0; p < g.grid().pixels(); ++p) {
      ASSERT_EQ(capped[p], g[p] > 0 ? 1u : 0u);
    }
  }
}

TEST(CapGazeMapTest, ZeroCapRejected) {
  const GazeMap g(GridSpec(1, 1), {1});
  try {
    CapGazeMap(g, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

TEST(CapGazeMapTest, IdempotentAndMonotoneInCap) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const GazeMap g = testing::RandomGazeMap(rng, GridSpec(6, 5), 12);
    std::uniform_int_distribution<Count> cap(1, 12);
    Count m1 = cap(rng), m2 = cap(rng);
    if (m1 > m2) std::swap(m1, m2);
    const GazeMap a = CapGazeMap(g, m1);
    const GazeMap b = CapGazeMap(g, m2);
    EXPECT_EQ(CapGazeMap(a, m1), a);
    for (std::size_t p = 0; p < g.grid().pixels(); ++p) {
      ASSERT_LE(a[p], b[p]);
      ASSERT_LE(a[p], m1);
    }
  }
}

TEST(AggregateTest, SingleMapIsIdentity) {
  const GazeCollection c(GridSpec(3, 1), {GazeMap(GridSpec(3, 1), {2, 0, 7})});
  const AggregateMap a = Aggregate(c);
  EXPECT_THAT(testing::Vec(a.values()), ElementsAre(2.0, 0.0, 7.0));
  EXPECT_EQ(a.normalization(), 1u);
}

TEST(AggregateTest, TwoMapsAverage) {
  const GridSpec g(2, 1);
  const GazeCollection c(g, {GazeMap(g, {1, 0}), GazeMap(g, {0, 1})});
  EXPECT_THAT(testing::Vec(Aggregate(c).values()), ElementsAre(0.5, 0.5));
}

TEST(AggregateTest, MatchesSummationOracle) {
  std::mt19937_64 rng(6);
  const GridSpec g(13, 11);
  const GazeCollection c = testing::RandomCollection(rng, g, 50, 4);
  const auto expected = testing::SumOracle(c);
  const AggregateMap a = Aggregate(c);
  for (std::size_t p = 0; p < g.pixels(); ++p) {
    ASSERT_NEAR(a[p], expected[p], 1e-12);
  }
  EXPECT_EQ(a.normalization(), 50u);
}

TEST(AggregateTest, GridMismatchRejected) {
  std::vector<GazeMap> maps = {GazeMap(GridSpec(2, 2)), GazeMap(GridSpec(4, 1))};
  EXPECT_THROW(GazeCollection(std::move(maps)), Error);
  EXPECT_THROW(GazeCollection(std::vector<GazeMap>{}), Error);
}

TEST(AggregateTest, LinearUnderConcatenation) {
  std::mt19937_64 rng(7);
  const GridSpec g(5, 4);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n1 = 1 + rng() % 9, n2 = 1 + rng() % 9;
    const auto c1 = testing::RandomCollection(rng, g, n1, 3);
    const auto c2 = testing::RandomCollection(rng, g, n2, 3);
    std::vector<GazeMap> all;
    for (std::size_t i = 0; i < n1; ++i) all.push_back(c1[i]);
    for (std::size_t i = 0; i < n2; ++i) all.push_back(c2[i]);
    const auto joint = Aggregate(GazeCollection(g, std::move(all)));
    const auto a1 = Aggregate(c1), a2 = Aggregate(c2);
    for (std::size_t p = 0; p < g.pixels(); ++p) {
      const double combined = (n1 * a1[p] + n2 * a2[p]) / double(n1 + n2);
      ASSERT_NEAR(joint[p], combined, 1e-12);
    }
  }
}

TEST(AggregateTest, CappedValuesStayInRange) {
  std::mt19937_64 rng(8);
  const GridSpec g(7, 7);
  for (Count m = 1; m <= 4; ++m) {
    const auto a = Aggregate(CapCollection(testing::RandomCollection(rng, g, 12, 9), m));
    for (double v : a.values()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, double(m));
    }
  }
}

TEST(AggregateTest, OneObserverMovesAPixelByAtMostCapOverN) {
  std::mt19937_64 rng(9);
  const GridSpec g(6, 6);
  const Count m = 3;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng() % 20;
    const auto c = CapCollection(testing::RandomCollection(rng, g, n, 8), m);
    const std::size_t i = rng() % n;
    std::vector<GazeMap> changed;
    for (std::size_t k = 0; k < n; ++k) {
      changed.push_back(k == i ? CapGazeMap(testing::RandomGazeMap(rng, g, 8), m)
                               : c[k]);
    }
    const auto a = Aggregate(c);
    const auto b = Aggregate(GazeCollection(g, std::move(changed)));
    for (std::size_t p = 0; p < g.pixels(); ++p) {
      ASSERT_LE(std::abs(a[p] - b[p]), double(m) / double(n) + 1e-12);
    }
  }
}

TEST(GazeCollectionTest, ReplicatedSharesMapsAndKeepsTheAverage) {
  std::mt19937_64 rng(10);
  const GridSpec g(4, 4);
  const auto c = testing::RandomCollection(rng, g, 5, 3);
  const auto big = c.Replicated(1000);
  EXPECT_EQ(big.size(), 5000u);
  EXPECT_EQ(big[999], c[0]);
  EXPECT_EQ(big[1000], c[1]);
  const auto a = Aggregate(c), b = Aggregate(big);
  for (std::size_t p = 0; p < g.pixels(); ++p) ASSERT_NEAR(a[p], b[p], 1e-12);
}

TEST(DownsampleTest, BlockSumPreservesCounts) {
  const GazeMap g(GridSpec(3, 3), {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const GazeMap d = Downsample(g, 2);
  EXPECT_EQ(d.grid(), GridSpec(2, 2));
  EXPECT_THAT(testing::Vec(d.counts()), ElementsAre(12, 9, 15, 9));
  EXPECT_EQ(d.Total(), g.Total());
  EXPECT_EQ(Downsample(g, 1), g);
}

}  // namespace
}  // namespace gazedp
