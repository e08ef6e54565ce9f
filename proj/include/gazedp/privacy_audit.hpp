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

// Attacks and audits against the release mechanisms:
//  * exact reconstruction of a withheld observer from a noise-free release,
//  * the single-pixel distinguisher against random selection,
//  * a Monte Carlo check of the (epsilon, delta) inequality for additive noise
//    on the worst-case neighboring pair.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gazedp/detail/parallel.hpp"
#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/mechanisms.hpp"
#include "gazedp/random.hpp"

namespace gazedp {

// Recovers the withheld observer as round(n * G - sum of the others).
inline GazeMap ReconstructNoiseFree(const AggregateMap& released,
                                    const GazeCollection& others,
                                    std::size_t n) {
  detail::Require(n >= 1, "observer count must be at least 1");
  detail::Require(released.normalization() == n,
                  "release was normalized by " +
                      std::to_string(released.normalization()) + ", not n = " +
                      std::to_string(n));
  detail::Require(others.size() + 1 == n,
                  "expected " + std::to_string(n - 1) + " background maps, got " +
                      std::to_string(others.size()));
  detail::Require(others.grid() == released.grid(),
                  "background grid does not match the release");
  const std::size_t r = released.grid().pixels();
  std::vector<std::int64_t> background(r, 0);
  for (std::size_t i = 0; i < others.size(); ++i) {
    const auto counts = others[i].counts();
    for (std::size_t p = 0; p < r; ++p) background[p] += counts[p];
  }
  std::vector<Count> recovered(r);
  const auto nn = static_cast<double>(n);
  for (std::size_t p = 0; p < r; ++p) {
    const auto total = std::llround(nn * released[p]);
    const std::int64_t own = total - background[p];
    detail::Require(own >= 0, "release is inconsistent with the background at "
                              "pixel " + std::to_string(p));
    recovered[p] = static_cast<Count>(own);
  }
  return GazeMap(released.grid(), std::move(recovered));
}

struct AttackReport {
  std::string mechanism;
  std::size_t trials = 0;
  // Set only for deterministic mechanisms.
  std::optional<bool> exact_recovery;
  // |Pr[event | looked] - Pr[event | not looked]|, in [0, 1].
  double advantage = 0;
  double looked_frequency = 0;
  double not_looked_frequency = 0;
  std::string notes;
};

// Full reconstruction attack: release the noise-free aggregate, hand the
// adversary every other map, and compare the recovery with the truth.
inline AttackReport AttackNoiseFree(const GazeCollection& collection,
                                    std::size_t target_index) {
  const AggregateMap released = MechNoiseFree(collection);
  const GazeCollection others = collection.Without(target_index);
  const GazeMap recovered =
      ReconstructNoiseFree(released, others, collection.size());
  AttackReport report;
  report.mechanism = "noise-free";
  report.trials = 1;
  report.exact_recovery = recovered == collection[target_index];
  report.advantage = *report.exact_recovery ? 1.0 : 0.0;
  report.notes = "n*G minus the background recovers observer " +
                 std::to_string(target_index);
  return report;
}

// Distinguisher against random selection on the single-pixel worst case:
// the target looked once and nobody else did, versus nobody looked. The
// event is "released value >= 1/(c n)".
inline AttackReport AttackRandomSelection(const GazeCollection& collection,
                                          const SelectionConfig& sel,
                                          std::size_t target_index,
                                          std::size_t trials, RngSeed seed,
                                          Parallelism par = {}) {
  detail::Require(trials >= 1, "attack needs at least one trial");
  const std::size_t n = collection.size();
  detail::Require(target_index < n, "target index out of range");
  const std::size_t k = sel.SelectedCount(n);
  const GridSpec pixel(1, 1);

  std::vector<GazeMap> looked_maps(n, GazeMap(pixel));
  looked_maps[target_index] = GazeMap(pixel, {1});
  const GazeCollection looked(pixel, std::move(looked_maps));
  const GazeCollection not_looked(pixel, std::vector<GazeMap>(n, GazeMap(pixel)));

  const auto count_events = [&](const GazeCollection& world,
                                std::uint64_t hypothesis) {
    std::uint64_t hits = 0;
    std::vector<std::uint8_t> event(trials, 0);
    detail::ParallelFor(trials, par, [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const AggregateMap out = MechRandomSelect(
            world, sel, seed.Substream(hypothesis).Substream(t));
        // out * k is an integer count; compare with slack for rounding.
        event[t] = out[0] * static_cast<double>(k) >= 1.0 - 1e-9;
      }
    });
    for (auto e : event) hits += e;
    return hits;
  };

  AttackReport report;
  report.mechanism = sel.with_replacement() ? "rs2" : "rs1";
  report.trials = trials;
  report.looked_frequency =
      static_cast<double>(count_events(looked, 0)) / static_cast<double>(trials);
  report.not_looked_frequency = static_cast<double>(count_events(not_looked, 1)) /
                                static_cast<double>(trials);
  report.advantage =
      std::abs(report.looked_frequency - report.not_looked_frequency);
  const double expected =
      sel.with_replacement()
          ? 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(n),
                           static_cast<double>(k))
          : static_cast<double>(k) / static_cast<double>(n);
  report.notes = "selected " + std::to_string(k) + " of " + std::to_string(n) +
                 "; closed-form looked-branch probability " +
                 std::to_string(expected) + "; any delta below the advantage "
                 "is violated";
  return report;
}

enum class ThresholdTail { kUpper, kLower };

struct DpAuditReport {
  double epsilon = 0;
  double delta = 0;
  double sigma = 0;
  std::size_t trials = 0;
  // max over events S and both orderings of
  // Pr[M(D) in S] - e^eps Pr[M(D') in S] - delta.
  double worst_margin = -std::numeric_limits<double>::infinity();
  // Monte Carlo standard error of the worst event's margin estimate.
  double worst_margin_se = 0;
  double worst_threshold = 0;
  ThresholdTail worst_tail = ThresholdTail::kUpper;
  // True when the worst event compares the all-zero world against the all-m one.
  bool worst_swapped = false;
  std::string event_family;
  std::string confidence_note;

  // Violation beyond three standard errors.
  bool Violated() const { return worst_margin > 3.0 * worst_margin_se; }
};

struct AuditOptions {
  std::size_t thresholds = 200;
  // Audit sigma * noise_scale while keeping the calibration's privacy target;
  // values below 1 deliberately under-noise.
  double noise_scale = 1.0;
  // Exchange the substreams drawn for D and D'.
  bool swap_hypotheses = false;
  Parallelism par;
};

namespace detail {

// Per-threshold counts of samples >= t_k.
struct TailCounts {
  std::vector<std::uint64_t> at_or_above;
};

}  // namespace detail

// Worst-case neighbors: the target's map is all-m (D) or all-zero (D'), and
// the n - 1 background maps are zero. Threshold events {x_0 >= t} and
// {x_0 < t} on the first released pixel, over a grid spanning +-6 sigma around
// both hypothesis means, are checked in both orderings.
inline DpAuditReport AuditAdditiveMechanism(NoiseKind kind,
                                            const NoiseCalibration& cal,
                                            std::size_t n, std::size_t r,
                                            Count m, std::size_t trials,
                                            RngSeed seed,
                                            const AuditOptions& options = {}) {
  detail::Require(kind == cal.kind(), "audit kind does not match calibration");
  detail::RequireShape(n, r, m);
  detail::Require(options.thresholds >= 2, "need at least two thresholds");
  detail::Require(options.noise_scale > 0, "noise scale must be positive");
  const double epsilon = cal.derived_from().epsilon;
  const double delta = cal.derived_from().delta;
  detail::Require(std::isfinite(epsilon), "cannot audit a no-noise calibration");
  if (delta > 0) {
    detail::Require(static_cast<double>(trials) >= 100.0 / delta,
                    std::to_string(trials) + " trials cannot resolve delta = " +
                        std::to_string(delta) + " (need >= 100/delta)",
                    ErrorCode::kInsufficientTrials);
  } else {
    detail::Require(trials >= 10000, "pure-epsilon audits need >= 10^4 trials",
                    ErrorCode::kInsufficientTrials);
  }
  const double sigma = cal.sigma() * options.noise_scale;

  const GridSpec grid(r, 1);
  std::vector<GazeMap> with_target(n, GazeMap(grid));
  with_target[0] = GazeMap(grid, std::vector<Count>(r, m));
  const AggregateMap mean_d = Aggregate(GazeCollection(grid, std::move(with_target)));
  const AggregateMap mean_d_prime =
      Aggregate(GazeCollection(grid, std::vector<GazeMap>(n, GazeMap(grid))));

  const double lo = std::min(mean_d[0], mean_d_prime[0]) - 6.0 * sigma;
  const double hi = std::max(mean_d[0], mean_d_prime[0]) + 6.0 * sigma;
  const std::size_t kN = options.thresholds;
  std::vector<double> thresholds(kN);
  for (std::size_t k = 0; k < kN; ++k) {
    thresholds[k] = lo + (hi - lo) * static_cast<double>(k) /
                             static_cast<double>(kN - 1);
  }

  // Released value at pixel 0 for trial t equals
  // AddNoise(mean, kind, sigma, trial_seed)[0].
  const auto tail_counts = [&](const AggregateMap& mean, std::uint64_t label) {
    const RngSeed hyp_seed = seed.Substream(label);
    const unsigned workers = options.par.Resolve();
    std::vector<std::vector<std::uint64_t>> partial(
        workers + 1, std::vector<std::uint64_t>(kN + 1, 0));
    std::vector<std::uint64_t> below(kN + 1, 0);
    const std::size_t chunk = (trials + workers - 1) / workers;
    detail::ParallelFor(
        workers, Parallelism{workers},
        [&](std::size_t wb, std::size_t we) {
          for (std::size_t w = wb; w < we; ++w) {
            auto& hist = partial[w];
            const std::size_t t0 = w * chunk;
            const std::size_t t1 = std::min(trials, t0 + chunk);
            for (std::size_t t = t0; t < t1; ++t) {
              const double x =
                  mean[0] + NoiseAt(kind, sigma, hyp_seed.Substream(t), 0);
              // Number of thresholds <= x.
              const auto it =
                  std::upper_bound(thresholds.begin(), thresholds.end(), x);
              ++hist[static_cast<std::size_t>(it - thresholds.begin())];
            }
          }
        },
        1);
    for (const auto& hist : partial) {
      for (std::size_t b = 0; b <= kN; ++b) below[b] += hist[b];
    }
    // at_or_above[k] = #{x >= t_k} = #{samples with more than k thresholds <= x}.
    detail::TailCounts out;
    out.at_or_above.assign(kN, 0);
    std::uint64_t running = 0;
    for (std::size_t b = kN; b >= 1; --b) {
      running += below[b];
      out.at_or_above[b - 1] = running;
    }
    return out;
  };

  const auto counts_d = tail_counts(mean_d, options.swap_hypotheses ? 1 : 0);
  const auto counts_d_prime =
      tail_counts(mean_d_prime, options.swap_hypotheses ? 0 : 1);

  DpAuditReport report;
  report.epsilon = epsilon;
  report.delta = delta;
  report.sigma = sigma;
  report.trials = trials;
  report.event_family = std::to_string(kN) +
                        " thresholds on pixel 0 over [" + std::to_string(lo) +
                        ", " + std::to_string(hi) +
                        "], upper and lower tails, both orderings";
  const double e_eps = std::exp(epsilon);
  const double total = static_cast<double>(trials);
  const auto consider = [&](double pa, double pb, double threshold,
                            ThresholdTail tail, bool swapped) {
    const double margin = pa - e_eps * pb - delta;
    if (margin > report.worst_margin) {
      report.worst_margin = margin;
      report.worst_margin_se = std::sqrt(pa * (1 - pa) / total +
                                         e_eps * e_eps * pb * (1 - pb) / total);
      report.worst_threshold = threshold;
      report.worst_tail = tail;
      report.worst_swapped = swapped;
    }
  };
  for (std::size_t k = 0; k < kN; ++k) {
    const double up_d = static_cast<double>(counts_d.at_or_above[k]) / total;
    const double up_dp =
        static_cast<double>(counts_d_prime.at_or_above[k]) / total;
    consider(up_d, up_dp, thresholds[k], ThresholdTail::kUpper, false);
    consider(up_dp, up_d, thresholds[k], ThresholdTail::kUpper, true);
    consider(1 - up_d, 1 - up_dp, thresholds[k], ThresholdTail::kLower, false);
    consider(1 - up_dp, 1 - up_d, thresholds[k], ThresholdTail::kLower, true);
  }
  report.confidence_note =
      "margins are Monte Carlo estimates; violation means worst margin > 3 SE "
      "(SE = " + std::to_string(report.worst_margin_se) + ")";
  return report;
}

}  // namespace gazedp
