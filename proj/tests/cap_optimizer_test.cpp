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

#include "gazedp/cap_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gazedp/mechanisms.hpp"
#include "gazedp/synthetic.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gazedp {
namespace {

// Capped and uncapped averages computed observer by observer.
std::vector<long double> CappedMean(const GazeCollection& c, Count m) {
  std::vector<long double> acc(c.grid().pixels(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += std::min(c[i][p], m);
  }
  for (auto& v : acc) v /= c.size();
  return acc;
}

long double FormulaOracle(const GazeCollection& c, Count m, double s) {
  const auto capped = CappedMean(c, m);
  const auto raw = CappedMean(c, c.MaxCount());
  long double bias = 0;
  for (std::size_t p = 0; p < raw.size(); ++p) {
    bias += (capped[p] - raw[p]) * (capped[p] - raw[p]);
  }
  return (long double)m * m * s * s + bias / raw.size();
}

TEST(ExpectedMseTest, NoNoiseAndNoBiasIsZero) {
  std::mt19937_64 rng(41);
  const auto c = testing::RandomCollection(rng, GridSpec(5, 5), 6, 4);
  for (Count m = c.MaxCount(); m < c.MaxCount() + 3; ++m) {
    EXPECT_EQ(ExpectedMse(c, m, 0.0), 0.0);
  }
}

TEST(ExpectedMseTest, AboveMaxCountOnlyNoiseRemains) {
  std::mt19937_64 rng(42);
  const auto c = testing::RandomCollection(rng, GridSpec(4, 6), 5, 3);
  const double s = 0.37;
  for (Count m = c.MaxCount(); m < c.MaxCount() + 4; ++m) {
    EXPECT_DOUBLE_EQ(ExpectedMse(c, m, s), double(m) * m * s * s);
  }
}

TEST(ExpectedMseTest, DecomposesIntoBiasAndQuadraticNoise) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> sigma(0, 2);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = testing::RandomCollection(rng, GridSpec(6, 3), 2 + rng() % 8, 7);
    const double s = sigma(rng);
    double prev_bias = INFINITY;
    for (Count m = 1; m <= c.MaxCount() + 1; ++m) {
      const double total = ExpectedMse(c, m, s);
      const double bias = ExpectedMse(c, m, 0.0);
      EXPECT_NEAR(total - bias, double(m) * m * s * s, 1e-12 * (1 + total));
      EXPECT_LE(bias, prev_bias);
      EXPECT_NEAR(total, double(FormulaOracle(c, m, s)), 1e-12 * (1 + total));
      prev_bias = bias;
    }
  }
}

// Gaussian releases of the capped average at sigma = m s, scored against the
// uncapped average, using the standard library's normal generator.
TEST(ExpectedMseTest, MatchesMonteCarloWithinThreeStandardErrors) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> sigma(0.05, 1.0);
  constexpr int kTrials = 100000;
  for (int rep = 0; rep < 20; ++rep) {
    const GridSpec g(1 + rng() % 4, 1 + rng() % 4);
    const auto c = testing::RandomCollection(rng, g, 2 + rng() % 10, 5);
    const Count m = 1 + rng() % c.MaxCount();
    const double s = sigma(rng);
    const auto capped = CappedMean(c, m);
    const auto raw = CappedMean(c, c.MaxCount());
    std::normal_distribution<double> noise(0.0, m * s);
    double sum = 0, sum_sq = 0;
    for (int t = 0; t < kTrials; ++t) {
      double mse = 0;
      for (std::size_t p = 0; p < g.pixels(); ++p) {
        const double d = double(capped[p]) + noise(rng) - double(raw[p]);
        mse += d * d;
      }
      mse /= g.pixels();
      sum += mse;
      sum_sq += mse * mse;
    }
    const double mean = sum / kTrials;
    const double se = std::sqrt((sum_sq / kTrials - mean * mean) / (kTrials - 1));
    EXPECT_NEAR(mean, ExpectedMse(c, m, s), 3 * se) << "rep " << rep;
  }
}

TEST(OptimizeCapTest, MatchesBruteForceForSmallMaxCounts) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> logsigma(-6, 1);
  int instances = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const Count cap = 1 + rng() % 6;
    const auto c = testing::RandomCollection(rng, GridSpec(1 + rng() % 8, 1 + rng() % 8),
                                             1 + rng() % 12, cap);
    if (c.MaxCount() == 0 || c.MaxCount() > 6) continue;
    ++instances;
    const double s = std::exp(logsigma(rng));
    long double best = INFINITY;
    Count arg = 0;
    for (Count m = 1; m <= c.MaxCount(); ++m) {
      const long double v = FormulaOracle(c, m, s);
      if (v < best * (1 - 1e-12L)) {
        best = v;
        arg = m;
      }
    }
    const auto result = OptimizeCap(c, s);
    ASSERT_EQ(result.m_star, arg) << "rep " << rep;
    ASSERT_EQ(result.expected_mse_by_m.size(), c.MaxCount());
    ASSERT_FALSE(result.degenerate);
    for (Count m = 1; m <= c.MaxCount(); ++m) {
      ASSERT_GE(result.ExpectedMse(m), result.ExpectedMse(result.m_star));
    }
  }
  EXPECT_GT(instances, 200);
}

TEST(OptimizeCapTest, NoNoisePicksTheMaxCount) {
  std::mt19937_64 rng(46);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = testing::RandomCollection(rng, GridSpec(5, 5), 4, 9);
    const auto result = OptimizeCap(c, 0.0);
    EXPECT_EQ(result.m_star, c.MaxCount());
    EXPECT_EQ(result.ExpectedMse(result.m_star), 0.0);
  }
}

TEST(OptimizeCapTest, TiesGoToTheSmallestCap) {
  // Every observer map is an indicator, so all caps give identical bias; with
  // sigma_star = 0 every entry is 0.
  const GridSpec g(2, 1);
  const GazeCollection c(g, {GazeMap(g, {1, 0}), GazeMap(g, {0, 1})});
  EXPECT_EQ(OptimizeCap(c, 0.0).m_star, 1u);
  const GazeCollection flat(g, {GazeMap(g, {3, 3}), GazeMap(g, {3, 3})});
  const auto result = OptimizeCap(flat, 0.0);
  EXPECT_EQ(result.ExpectedMse(3), 0.0);
  EXPECT_EQ(result.m_star, 3u);
}

TEST(OptimizeCapTest, AllZeroCollectionIsDegenerate) {
  const GridSpec g(3, 3);
  const auto result = OptimizeCap(GazeCollection(g, {GazeMap(g), GazeMap(g)}), 0.5);
  EXPECT_TRUE(result.degenerate);
  EXPECT_EQ(result.m_star, 1u);
  EXPECT_EQ(result.g_max, 0u);
  EXPECT_TRUE(result.expected_mse_by_m.empty());
}

TEST(OptimizeCapTest, FiveBinaryObserversAtHighResolutionPickOne) {
  const GridSpec g(168, 105);
  SyntheticOptions opts;
  opts.seed = RngSeed{7};
  auto maps = CapCollection(RasterizeObservers(SynthesizeFixations(g, opts), g), 1);
  const auto big = maps.Replicated(10000);
  const double sigma_star =
      CalibrateGaussian(PrivacyLevel(1.5, DeltaForObservers(big.size())), big.size(),
                        1050 * 1680, 1)
          .sigma();
  const auto result = OptimizeCap(big, sigma_star);
  EXPECT_EQ(result.g_max, 1u);
  EXPECT_EQ(result.m_star, 1u);
}

GazeCollection ShapedCollection(std::mt19937_64& rng, std::size_t n, std::size_t r,
                                Count g_max) {
  const GridSpec grid(r, 1);
  auto c = testing::RandomCollection(rng, grid, n, g_max);
  std::vector<GazeMap> maps;
  for (std::size_t i = 0; i < c.size(); ++i) maps.push_back(c[i]);
  std::vector<Count> counts(maps[0].counts().begin(), maps[0].counts().end());
  counts[0] = g_max;
  maps[0] = GazeMap(grid, std::move(counts));
  return GazeCollection(grid, std::move(maps));
}

TEST(OptimizeCapTest, WorkGrowsLinearlyInEachFactor) {
  std::mt19937_64 rng(47);
  const std::size_t n = 40, r = 64;
  const Count g = 5;
  const auto work = [&](std::size_t nn, std::size_t rr, Count gg) {
    return double(OptimizeCap(ShapedCollection(rng, nn, rr, gg), 0.1).work);
  };
  const double base = work(n, r, g);
  EXPECT_LE(work(2 * n, r, g) / base, 2.2);
  EXPECT_LE(work(n, 2 * r, g) / base, 2.2);
  EXPECT_LE(work(n, r, 2 * g) / base, 2.2);
  EXPECT_GE(work(n, r, 2 * g) / base, 1.5);
}

TEST(OptimizeCapTest, Reproducible) {
  std::mt19937_64 rng(48);
  const auto c = testing::RandomCollection(rng, GridSpec(7, 7), 9, 6);
  const auto a = OptimizeCap(c, 0.2), b = OptimizeCap(c, 0.2);
  EXPECT_EQ(a.expected_mse_by_m, b.expected_mse_by_m);
  EXPECT_EQ(a.m_star, b.m_star);
  EXPECT_EQ(a.work, b.work);
}

TEST(OptimizeCapTest, RejectsNegativeSigma) {
  const GridSpec g(1, 1);
  EXPECT_THROW(OptimizeCap(GazeCollection(g, {GazeMap(g, {1})}), -1.0), Error);
}

}  // namespace
}  // namespace gazedp
