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

// Release mechanisms for aggregated gaze maps and the noise calibrations
// that make the additive ones (epsilon, delta)-differentially private.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazedp/detail/parallel.hpp"
#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/random.hpp"

namespace gazedp {

class PrivacyLevel {
 public:
  PrivacyLevel(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
    detail::Require(epsilon > 0 && std::isfinite(epsilon),
                    "epsilon must be positive and finite");
    detail::Require(delta >= 0 && delta < 1, "delta must lie in [0, 1)");
  }

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  friend bool operator==(const PrivacyLevel&, const PrivacyLevel&) = default;

 private:
  double epsilon_;
  double delta_;
};

enum class PrivacyPreset { kOkay, kGood };

inline PrivacyPreset ParsePrivacyPreset(std::string_view name) {
  if (name == "okay") return PrivacyPreset::kOkay;
  if (name == "good") return PrivacyPreset::kGood;
  throw Error(ErrorCode::kInvalidParameter,
              "unknown privacy preset '" + std::string(name) +
                  "' (expected okay or good)");
}

// delta = n^(-3/2), the rule shared by the named presets.
inline double DeltaForObservers(std::size_t n) {
  detail::Require(n >= 1, "observer count must be at least 1");
  return std::pow(static_cast<double>(n), -1.5);
}

// okay: epsilon = 3, good: epsilon = 1; both with delta = n^(-3/2).
inline PrivacyLevel MakePrivacyPreset(PrivacyPreset preset, std::size_t n) {
  const double delta = DeltaForObservers(n);
  detail::Require(delta < 1, "presets need n >= 2 so that delta < 1");
  return PrivacyLevel(preset == PrivacyPreset::kOkay ? 3.0 : 1.0, delta);
}

inline PrivacyLevel MakePrivacyPreset(std::string_view name, std::size_t n) {
  return MakePrivacyPreset(ParsePrivacyPreset(name), n);
}

enum class NoiseKind { kGaussian, kLaplacian };

inline std::string_view NoiseKindName(NoiseKind kind) {
  return kind == NoiseKind::kGaussian ? "gaussian" : "laplacian";
}

inline NoiseKind ParseNoiseKind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "laplacian") return NoiseKind::kLaplacian;
  throw Error(ErrorCode::kInvalidParameter,
              "unknown mechanism '" + std::string(name) +
                  "' (expected gaussian or laplacian)");
}

// The (epsilon, delta, n, r, m) tuple a noise level was derived for.
struct CalibrationInputs {
  double epsilon = 0;
  double delta = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  Count m = 0;
};

namespace detail {

inline void RequireShape(std::size_t n, std::size_t r, Count m) {
  Require(n >= 1, "observer count n must be at least 1");
  Require(r >= 1, "pixel count r must be at least 1");
  Require(m >= 1, "cap m must be at least 1");
}

}  // namespace detail

// sigma_N = (m / (n eps)) * sqrt(r (eps/2 + ln(r/delta))).
inline double GaussianNoiseBound(const PrivacyLevel& level, std::size_t n,
                                 std::size_t r, Count m) {
  detail::RequireShape(n, r, m);
  detail::Require(level.delta() > 0,
                  "the Gaussian noise bound needs delta > 0; use the Laplacian "
                  "mechanism for pure epsilon-DP",
                  ErrorCode::kUnsupportedForGaussian);
  const double eps = level.epsilon();
  const double rr = static_cast<double>(r);
  return static_cast<double>(m) / (static_cast<double>(n) * eps) *
         std::sqrt(rr * (eps / 2.0 + std::log(rr / level.delta())));
}

// sigma_L = sqrt(2) m r / (eps n).
inline double LaplacianNoiseBound(double epsilon, std::size_t n, std::size_t r,
                                  Count m) {
  detail::RequireShape(n, r, m);
  detail::Require(epsilon > 0 && std::isfinite(epsilon),
                  "epsilon must be positive and finite");
  return std::numbers::sqrt2 * static_cast<double>(m) *
         static_cast<double>(r) / (epsilon * static_cast<double>(n));
}

// A mechanism kind with its per-pixel noise standard deviation. Instances
// only come from the calibrate functions (optionally scaled up), so sigma is
// never below the bound for `derived_from`.
class NoiseCalibration {
 public:
  NoiseKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  const CalibrationInputs& derived_from() const { return inputs_; }

  // Same calibration with sigma multiplied by factor >= 1.
  NoiseCalibration WithSlack(double factor) const {
    detail::Require(factor >= 1 && std::isfinite(factor),
                    "slack factor must be >= 1");
    NoiseCalibration out = *this;
    out.sigma_ *= factor;
    return out;
  }

  // sigma = 0: the epsilon -> infinity limit, used as a no-noise control.
  static NoiseCalibration NoNoise(NoiseKind kind) {
    return NoiseCalibration(
        kind, 0.0, {std::numeric_limits<double>::infinity(), 0.0, 0, 0, 0});
  }

  friend NoiseCalibration CalibrateGaussian(const PrivacyLevel&, std::size_t,
                                            std::size_t, Count);
  friend NoiseCalibration CalibrateLaplacian(double, std::size_t, std::size_t,
                                             Count);

 private:
  NoiseCalibration(NoiseKind kind, double sigma, CalibrationInputs inputs)
      : kind_(kind), sigma_(sigma), inputs_(inputs) {}

  NoiseKind kind_;
  double sigma_;
  CalibrationInputs inputs_;
};

inline NoiseCalibration CalibrateGaussian(const PrivacyLevel& level,
                                          std::size_t n, std::size_t r,
                                          Count m) {
  const double sigma = GaussianNoiseBound(level, n, r, m);
  return NoiseCalibration(NoiseKind::kGaussian, sigma,
                          {level.epsilon(), level.delta(), n, r, m});
}

inline NoiseCalibration CalibrateLaplacian(double epsilon, std::size_t n,
                                           std::size_t r, Count m) {
  const double sigma = LaplacianNoiseBound(epsilon, n, r, m);
  return NoiseCalibration(NoiseKind::kLaplacian, sigma, {epsilon, 0.0, n, r, m});
}

// Sampling fraction c for the random-selection mechanisms; floor(c n) maps
// are drawn.
class SelectionConfig {
 public:
  SelectionConfig(double fraction, bool with_replacement)
      : fraction_(fraction), with_replacement_(with_replacement) {
    detail::Require(fraction > 0 && fraction <= 1,
                    "sampling fraction c must lie in (0, 1]");
  }

  double fraction() const { return fraction_; }
  bool with_replacement() const { return with_replacement_; }

  // floor(c n), tolerant of representation error in c (0.57 * 100 is 57).
  std::size_t SelectedCount(std::size_t n) const {
    const double raw = fraction_ * static_cast<double>(n);
    const auto count = static_cast<std::size_t>(std::floor(raw + 1e-9 * raw));
    detail::Require(count >= 1, "c * n = " + std::to_string(raw) +
                                    " selects no observers");
    return std::min(count, n);
  }

 private:
  double fraction_;
  bool with_replacement_;
};

inline AggregateMap MechNoiseFree(const GazeCollection& collection) {
  return Aggregate(collection);
}

// Observer indices drawn by one random-selection release. Without
// replacement this is a partial Fisher-Yates shuffle, so indices are
// distinct; with replacement each draw is uniform and independent.
inline std::vector<std::size_t> SampleObserverIndices(std::size_t n,
                                                      const SelectionConfig& sel,
                                                      RngSeed seed) {
  const std::size_t k = sel.SelectedCount(n);
  CounterStream stream(seed, StreamTag::kSelection);
  std::vector<std::size_t> picked(k);
  if (sel.with_replacement()) {
    for (auto& idx : picked) idx = stream.NextBelow(n);
    return picked;
  }
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t swap_with = j + stream.NextBelow(n - j);
    std::swap(pool[j], pool[swap_with]);
    picked[j] = pool[j];
  }
  return picked;
}

inline AggregateMap MechRandomSelect(const GazeCollection& collection,
                                     const SelectionConfig& sel, RngSeed seed) {
  const auto indices = SampleObserverIndices(collection.size(), sel, seed);
  const std::size_t r = collection.grid().pixels();
  std::vector<std::uint64_t> sums(r, 0);
  for (std::size_t idx : indices) {
    const auto counts = collection[idx].counts();
    for (std::size_t p = 0; p < r; ++p) sums[p] += counts[p];
  }
  const auto k = static_cast<double>(indices.size());
  std::vector<double> values(r);
  for (std::size_t p = 0; p < r; ++p) values[p] = static_cast<double>(sums[p]) / k;
  return AggregateMap(collection.grid(), std::move(values), indices.size());
}

// Zero-mean noise with standard deviation `sigma` for one pixel of one
// substream: the exact value an additive mechanism adds at that pixel.
inline double NoiseAt(NoiseKind kind, double sigma, RngSeed seed,
                      std::uint64_t pixel) {
  if (sigma == 0) return 0.0;
  return sigma * (kind == NoiseKind::kGaussian ? StandardNormalAt(seed, pixel)
                                               : StandardLaplaceAt(seed, pixel));
}

// base + independent per-pixel noise. Each pixel reads its own counter, so the
// result does not depend on `par`.
inline AggregateMap AddNoise(const AggregateMap& base, NoiseKind kind,
                             double sigma, RngSeed seed, Parallelism par = {}) {
  detail::Require(sigma >= 0 && std::isfinite(sigma),
                  "noise sigma must be finite and non-negative");
  std::vector<double> values(base.values().begin(), base.values().end());
  detail::ParallelFor(values.size(), par,
                      [&](std::size_t begin, std::size_t end) {
                        for (std::size_t p = begin; p < end; ++p) {
                          values[p] += NoiseAt(kind, sigma, seed, p);
                        }
                      });
  return AggregateMap(base.grid(), std::move(values), base.normalization());
}

inline AggregateMap MechGaussian(const GazeCollection& collection,
                                 const NoiseCalibration& cal, RngSeed seed,
                                 Parallelism par = {}) {
  detail::Require(cal.kind() == NoiseKind::kGaussian,
                  "Gaussian mechanism given a Laplacian calibration");
  return AddNoise(Aggregate(collection), NoiseKind::kGaussian, cal.sigma(), seed,
                  par);
}

inline AggregateMap MechLaplacian(const GazeCollection& collection,
                                  const NoiseCalibration& cal, RngSeed seed,
                                  Parallelism par = {}) {
  detail::Require(cal.kind() == NoiseKind::kLaplacian,
                  "Laplacian mechanism given a Gaussian calibration");
  return AddNoise(Aggregate(collection), NoiseKind::kLaplacian, cal.sigma(),
                  seed, par);
}

inline AggregateMap MechAdditive(const GazeCollection& collection,
                                 const NoiseCalibration& cal, RngSeed seed,
                                 Parallelism par = {}) {
  return cal.kind() == NoiseKind::kGaussian
             ? MechGaussian(collection, cal, seed, par)
             : MechLaplacian(collection, cal, seed, par);
}

}  // namespace gazedp
