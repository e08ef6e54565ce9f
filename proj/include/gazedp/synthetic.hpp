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

// Seeded synthetic fixation data: observers scatter fixations around a
// shared set of hotspots, the way viewers of one stimulus tend to.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/io.hpp"
#include "gazedp/random.hpp"

namespace gazedp {

struct SyntheticOptions {
  std::size_t observers = 5;
  std::size_t fixations_per_observer = 400;
  std::size_t hotspots = 4;
  // Hotspot spread as a fraction of the shorter grid side.
  double spread = 0.05;
  // Fraction of fixations drawn uniformly over the grid.
  double background = 0.1;
  RngSeed seed;
};

inline std::vector<ObserverFixations> SynthesizeFixations(
    const GridSpec& grid, const SyntheticOptions& options) {
  detail::Require(options.observers >= 1, "need at least one observer");
  detail::Require(options.hotspots >= 1, "need at least one hotspot");
  detail::Require(options.spread > 0, "spread must be positive");
  detail::Require(options.background >= 0 && options.background <= 1,
                  "background fraction must lie in [0, 1]");
  const auto w = static_cast<double>(grid.width());
  const auto h = static_cast<double>(grid.height());
  const double sd = options.spread * std::min(w, h);

  CounterStream layout(options.seed.Substream(0), StreamTag::kSynthetic);
  std::vector<std::pair<double, double>> centers(options.hotspots);
  for (auto& [cx, cy] : centers) {
    cx = (0.15 + 0.7 * layout.NextUnit()) * w;
    cy = (0.15 + 0.7 * layout.NextUnit()) * h;
  }

  std::vector<ObserverFixations> out;
  out.reserve(options.observers);
  for (std::size_t i = 0; i < options.observers; ++i) {
    CounterStream stream(options.seed.Substream(i + 1), StreamTag::kSynthetic);
    ObserverFixations obs{"obs" + std::to_string(i + 1), {}};
    obs.fixations.reserve(options.fixations_per_observer);
    for (std::size_t f = 0; f < options.fixations_per_observer; ++f) {
      double x, y;
      if (stream.NextUnit() < options.background) {
        x = stream.NextUnit() * w;
        y = stream.NextUnit() * h;
      } else {
        const auto& [cx, cy] = centers[stream.NextBelow(centers.size())];
        x = cx + sd * stream.NextNormal();
        y = cy + sd * stream.NextNormal();
      }
      // Keep strictly inside the grid.
      x = std::clamp(x, 0.0, std::nextafter(w, 0.0));
      y = std::clamp(y, 0.0, std::nextafter(h, 0.0));
      obs.fixations.push_back({x, y, 1});
    }
    out.push_back(std::move(obs));
  }
  return out;
}

inline GazeCollection RasterizeObservers(
    const std::vector<ObserverFixations>& observers, const GridSpec& grid) {
  std::vector<GazeMap> maps;
  maps.reserve(observers.size());
  for (const auto& obs : observers) {
    maps.push_back(RasterizeFixations(obs.fixations, grid));
  }
  return GazeCollection(grid, std::move(maps));
}

inline void WriteFixationsCsv(std::ostream& out,
                              const std::vector<ObserverFixations>& observers) {
  out << "observer_id,x,y,weight\n";
  for (const auto& obs : observers) {
    for (const auto& f : obs.fixations) {
      out << obs.observer_id << ',' << detail::FormatReal(f.x) << ','
          << detail::FormatReal(f.y) << ',' << f.weight << '\n';
    }
  }
}

}  // namespace gazedp
