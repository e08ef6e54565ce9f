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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"

namespace gazedp {

class Heatmap {
 public:
  Heatmap(GridSpec grid, std::vector<double> intensities, double psf_sigma)
      : grid_(grid), intensities_(std::move(intensities)), psf_sigma_(psf_sigma) {
    detail::Require(intensities_.size() == grid_.pixels(),
                    "heatmap size does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> intensities() const { return intensities_; }
  std::span<const double> values() const { return intensities_; }
  double operator[](std::size_t pixel) const { return intensities_[pixel]; }
  double psf_sigma() const { return psf_sigma_; }

 private:
  GridSpec grid_;
  std::vector<double> intensities_;
  double psf_sigma_;
};

// Half-width of the square PSF support.
inline std::size_t PsfRadius(double psf_sigma) {
  return static_cast<std::size_t>(std::ceil(3.0 * psf_sigma));
}

namespace detail {

inline std::vector<double> PsfTaps(double psf_sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(PsfRadius(psf_sigma));
  std::vector<double> taps(2 * radius + 1);
  for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
    const auto dd = static_cast<double>(d);
    taps[d + radius] = std::exp(-dd * dd / (2.0 * psf_sigma * psf_sigma));
  }
  return taps;
}

// Divides by the global maximum when it is positive; otherwise the map has
// no positive mass to normalize against and renders as all-zero.
inline void NormalizeByMax(std::vector<double>& values) {
  if (values.empty()) return;
  const double peak = *std::max_element(values.begin(), values.end());
  if (peak > 0) {
    for (double& v : values) v /= peak;
  } else {
    std::fill(values.begin(), values.end(), 0.0);
  }
}

}  // namespace detail

// Splats every pixel's value with the Gaussian point spread
// exp(-(dx^2 + dy^2) / (2 sigma^2)) over the square window |dx|,|dy| <= R,
// R = ceil(3 sigma), zero-padded at the border, then max-normalizes.
// The isotropic kernel factorizes, so this runs as two 1-D passes.
template <typename Field>
Heatmap ConvolveHeatmap(const Field& field, double psf_sigma) {
  detail::Require(psf_sigma > 0 && std::isfinite(psf_sigma),
                  "psf sigma must be positive");
  const GridSpec& grid = field.grid();
  const std::span<const double> src = field.values();
  const auto w = static_cast<std::ptrdiff_t>(grid.width());
  const auto h = static_cast<std::ptrdiff_t>(grid.height());
  const auto taps = detail::PsfTaps(psf_sigma);
  const auto radius = static_cast<std::ptrdiff_t>(PsfRadius(psf_sigma));

  std::vector<double> rows(grid.pixels(), 0.0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0;
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, x - radius);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(w - 1, x + radius);
      for (std::ptrdiff_t sx = lo; sx <= hi; ++sx) {
        acc += src[y * w + sx] * taps[sx - x + radius];
      }
      rows[y * w + x] = acc;
    }
  }
  std::vector<double> out(grid.pixels(), 0.0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, y - radius);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(h - 1, y + radius);
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0;
      for (std::ptrdiff_t sy = lo; sy <= hi; ++sy) {
        acc += rows[sy * w + x] * taps[sy - y + radius];
      }
      out[y * w + x] = acc;
    }
  }
  detail::NormalizeByMax(out);
  return Heatmap(grid, std::move(out), psf_sigma);
}

// Display-only clamp of intensities into [0, 1].
inline Heatmap ClampForDisplay(const Heatmap& heatmap) {
  std::vector<double> v(heatmap.intensities().begin(),
                        heatmap.intensities().end());
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return Heatmap(heatmap.grid(), std::move(v), heatmap.psf_sigma());
}

}  // namespace gazedp
