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

// Utility of a noisy release against the noise-free one, and the
// privacy-utility sweep over epsilon.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gazedp/detail/parallel.hpp"
#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/heatmap.hpp"
#include "gazedp/mechanisms.hpp"
#include "gazedp/random.hpp"

namespace gazedp {

// Anything laid out on a grid with one real value per pixel.
template <typename T>
concept PixelField = requires(const T& f) {
  { f.grid() } -> std::convertible_to<const GridSpec&>;
  { f.values() } -> std::convertible_to<std::span<const double>>;
};

struct UtilityScore {
  double mse = 0;
  double cc = 0;
};

namespace detail {

template <PixelField A, PixelField B>
void RequireSameGrid(const A& a, const B& b) {
  Require(a.grid() == b.grid(), "grid mismatch: " + a.grid().ToString() +
                                    " vs " + b.grid().ToString());
}

}  // namespace detail

template <PixelField A, PixelField B>
double Mse(const A& a, const B& b) {
  detail::RequireSameGrid(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  double acc = 0;
  for (std::size_t p = 0; p < va.size(); ++p) {
    const double d = va[p] - vb[p];
    acc += d * d;
  }
  return acc / static_cast<double>(va.size());
}

// Pearson correlation over pixels, accumulated with Welford-style co-moment
// updates. Zero variance in either input is an error, not 0.
template <PixelField A, PixelField B>
double Cc(const A& a, const B& b) {
  detail::RequireSameGrid(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  double mean_a = 0, mean_b = 0, m2a = 0, m2b = 0, co = 0;
  for (std::size_t p = 0; p < va.size(); ++p) {
    const double k = static_cast<double>(p + 1);
    const double da = va[p] - mean_a;
    const double db = vb[p] - mean_b;
    mean_a += da / k;
    mean_b += db / k;
    m2a += da * (va[p] - mean_a);
    m2b += db * (vb[p] - mean_b);
    co += da * (vb[p] - mean_b);
  }
  if (!(m2a > 0) || !(m2b > 0)) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "correlation is undefined for a zero-variance map");
  }
  const double cc = co / std::sqrt(m2a * m2b);
  return std::clamp(cc, -1.0, 1.0);
}

template <PixelField A, PixelField B>
UtilityScore Score(const A& a, const B& b) {
  return {Mse(a, b), Cc(a, b)};
}

enum class ScoreStage { kAggregate, kHeatmap };

struct SweepRow {
  NoiseKind kind = NoiseKind::kGaussian;
  double epsilon = 0;
  double sigma = 0;
  double mse_mean = 0;
  double mse_std = 0;
  double cc_mean = 0;
  double cc_std = 0;
  std::size_t trials = 0;
};

struct SweepOptions {
  std::vector<double> epsilons;
  std::vector<NoiseKind> kinds = {NoiseKind::kGaussian, NoiseKind::kLaplacian};
  Count m = 1;
  std::size_t trials = 100;
  RngSeed seed;
  // Adds an epsilon = inf, sigma = 0 row per kind.
  bool include_no_noise_control = false;
  ScoreStage stage = ScoreStage::kAggregate;
  double psf_sigma = 2.0;
  Parallelism par;
};

namespace detail {

struct MeanStd {
  double mean = 0;
  double std = 0;
};

// Sample (n - 1) standard deviation.
inline MeanStd Summarize(std::span<const double> xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace detail

// For every (kind, epsilon): calibrate with delta = n^(-3/2) (Gaussian) or
// delta = 0 (Laplacian), release `trials` noisy aggregates of the m-capped
// collection and score each against the uncapped noise-free aggregate.
// Rows are ordered by kind, then by epsilon as given.
inline std::vector<SweepRow> TradeoffSweep(const GazeCollection& collection,
                                           const SweepOptions& options) {
  detail::Require(options.trials >= 2, "a sweep needs at least 2 trials");
  detail::Require(!options.kinds.empty(), "a sweep needs at least one kind");
  const std::size_t n = collection.size();
  const std::size_t r = collection.grid().pixels();
  const AggregateMap capped = Aggregate(CapCollection(collection, options.m));
  const AggregateMap reference = Aggregate(collection);

  std::optional<Heatmap> reference_heatmap;
  if (options.stage == ScoreStage::kHeatmap) {
    reference_heatmap = ConvolveHeatmap(reference, options.psf_sigma);
  }

  std::vector<double> epsilons = options.epsilons;
  if (options.include_no_noise_control) {
    epsilons.push_back(std::numeric_limits<double>::infinity());
  }
  detail::Require(!epsilons.empty(), "a sweep needs at least one epsilon");

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < options.kinds.size(); ++k) {
    const NoiseKind kind = options.kinds[k];
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      const double eps = epsilons[e];
      const NoiseCalibration cal =
          std::isinf(eps) ? NoiseCalibration::NoNoise(kind)
          : kind == NoiseKind::kGaussian
              ? CalibrateGaussian(PrivacyLevel(eps, DeltaForObservers(n)), n, r,
                                  options.m)
              : CalibrateLaplacian(eps, n, r, options.m);
      const RngSeed cell_seed =
          options.seed.Substream(static_cast<std::uint64_t>(kind)).Substream(e);
      std::vector<double> mses(options.trials);
      std::vector<double> ccs(options.trials);
      detail::ParallelFor(
          options.trials, options.par, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
              const AggregateMap noisy =
                  AddNoise(capped, kind, cal.sigma(), cell_seed.Substream(t));
              UtilityScore s;
              if (reference_heatmap) {
                s = Score(ConvolveHeatmap(noisy, options.psf_sigma),
                          *reference_heatmap);
              } else {
                s = Score(noisy, reference);
              }
              mses[t] = s.mse;
              ccs[t] = s.cc;
            }
          },
          2);
      const auto mse = detail::Summarize(mses);
      const auto cc = detail::Summarize(ccs);
      rows.push_back({kind, eps, cal.sigma(), mse.mean, mse.std, cc.mean, cc.std,
                      options.trials});
    }
  }
  return rows;
}

inline constexpr const char* kSweepCsvHeader =
    "kind,epsilon,sigma,mse_mean,mse_std,cc_mean,cc_std,trials";

inline void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows) {
  const auto num = [](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << kSweepCsvHeader << '\n';
  for (const auto& row : rows) {
    out << NoiseKindName(row.kind) << ',' << num(row.epsilon) << ','
        << num(row.sigma) << ',' << num(row.mse_mean) << ','
        << num(row.mse_std) << ',' << num(row.cc_mean) << ','
        << num(row.cc_std) << ',' << row.trials << '\n';
  }
}

}  // namespace gazedp
