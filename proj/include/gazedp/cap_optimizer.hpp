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

// Choice of the per-pixel cap m that minimizes the expected MSE of the
// Gaussian mechanism when its noise level scales as sigma_N = m * sigma_star.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"

namespace gazedp {

struct CapSearchResult {
  Count m_star = 1;
  Count g_max = 0;
  double sigma_star = 0;
  // expected_mse_by_m[k] is the expected MSE at m = k + 1.
  std::vector<double> expected_mse_by_m;
  // g_max == 0: every cap is vacuous, m_star is 1 and the table is empty.
  bool degenerate = false;
  // Pixel-level operations performed (cap-and-accumulate plus squared-error
  // terms); a deterministic stand-in for runtime.
  std::uint64_t work = 0;

  double ExpectedMse(Count m) const { return expected_mse_by_m.at(m - 1); }
};

namespace detail {

// Squared-bias term (1/r) sum_j (capped_j - uncapped_j)^2, with both maps
// given as unnormalized per-pixel sums over n observers.
inline double CappingBias(std::span<const std::uint64_t> capped_sums,
                          std::span<const std::uint64_t> raw_sums,
                          std::size_t n) {
  const auto nn = static_cast<double>(n);
  double bias = 0;
  for (std::size_t p = 0; p < raw_sums.size(); ++p) {
    const double diff =
        (static_cast<double>(raw_sums[p]) - static_cast<double>(capped_sums[p])) /
        nn;
    bias += diff * diff;
  }
  return bias / static_cast<double>(raw_sums.size());
}

inline std::vector<std::uint64_t> PixelSums(const GazeCollection& c, Count cap,
                                            std::uint64_t* work) {
  const std::size_t r = c.grid().pixels();
  std::vector<std::uint64_t> sums(r, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto counts = c[i].counts();
    for (std::size_t p = 0; p < r; ++p) sums[p] += std::min(counts[p], cap);
  }
  if (work) *work += static_cast<std::uint64_t>(c.size()) * r;
  return sums;
}

}  // namespace detail

// m^2 sigma_star^2 + (1/r) sum_j (G^(m)(j) - G^(inf)(j))^2, where G^(m) is
// the noise-free aggregate of the m-capped maps and G^(inf) the uncapped one.
inline double ExpectedMse(const GazeCollection& collection, Count m,
                          double sigma_star) {
  detail::Require(m >= 1, "cap m must be at least 1");
  detail::Require(sigma_star >= 0 && std::isfinite(sigma_star),
                  "sigma_star must be finite and non-negative");
  const auto raw = detail::PixelSums(collection, collection.MaxCount(), nullptr);
  const auto capped = detail::PixelSums(collection, m, nullptr);
  const double md = static_cast<double>(m);
  return md * md * sigma_star * sigma_star +
         detail::CappingBias(capped, raw, collection.size());
}

// Evaluates the expected MSE for every m in 1..g_max over the UNCAPPED
// maps and returns the minimizer, smallest m on ties.
inline CapSearchResult OptimizeCap(const GazeCollection& collection,
                                   double sigma_star) {
  detail::Require(sigma_star >= 0 && std::isfinite(sigma_star),
                  "sigma_star must be finite and non-negative");
  CapSearchResult result;
  result.sigma_star = sigma_star;
  result.g_max = collection.MaxCount();
  if (result.g_max == 0) {
    result.degenerate = true;
    return result;
  }
  const auto raw = detail::PixelSums(collection, result.g_max, &result.work);
  const std::size_t r = collection.grid().pixels();
  result.expected_mse_by_m.reserve(result.g_max);
  double best = 0;
  for (Count m = 1; m <= result.g_max; ++m) {
    const auto capped = detail::PixelSums(collection, m, &result.work);
    const double md = static_cast<double>(m);
    const double value = md * md * sigma_star * sigma_star +
                         detail::CappingBias(capped, raw, collection.size());
    result.work += r;
    result.expected_mse_by_m.push_back(value);
    if (m == 1 || value < best) {
      best = value;
      result.m_star = m;
    }
  }
  return result;
}

}  // namespace gazedp
