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

// Grid data model: per-observer gaze maps, collections of them, and the
// observer-normalized aggregate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazedp/error.hpp"

namespace gazedp {

using Count = std::uint32_t;

// Row-major pixel grid with origin at the top-left.
class GridSpec {
 public:
  GridSpec(std::size_t width, std::size_t height)
      : width_(width), height_(height) {
    detail::Require(width >= 1 && height >= 1,
                    "grid dimensions must be at least 1x1");
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixels() const { return width_ * height_; }

  std::size_t Index(std::size_t x, std::size_t y) const {
    return y * width_ + x;
  }

  std::string ToString() const {
    return std::to_string(width_) + "x" + std::to_string(height_);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
};

struct Fixation {
  double x = 0;
  double y = 0;
  Count weight = 1;
};

// One observer's per-pixel look counts.
class GazeMap {
 public:
  explicit GazeMap(GridSpec grid)
      : grid_(grid), counts_(grid.pixels(), 0) {}

  GazeMap(GridSpec grid, std::vector<Count> counts)
      : grid_(grid), counts_(std::move(counts)) {
    detail::Require(counts_.size() == grid_.pixels(),
                    "gaze map has " + std::to_string(counts_.size()) +
                        " counts for a " + grid_.ToString() + " grid");
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const Count> counts() const { return counts_; }
  Count operator[](std::size_t pixel) const { return counts_[pixel]; }
  Count at(std::size_t x, std::size_t y) const {
    return counts_[grid_.Index(x, y)];
  }

  Count MaxCount() const {
    return counts_.empty() ? 0
                           : *std::max_element(counts_.begin(), counts_.end());
  }

  std::uint64_t Total() const {
    std::uint64_t total = 0;
    for (Count c : counts_) total += c;
    return total;
  }

  friend bool operator==(const GazeMap&, const GazeMap&) = default;

 private:
  GridSpec grid_;
  std::vector<Count> counts_;
};

// Ordered, non-empty set of gaze maps over one grid. Members are held by
// shared immutable pointers so a collection can be replicated cheaply.
class GazeCollection {
 public:
  GazeCollection(GridSpec grid, std::vector<GazeMap> maps) : grid_(grid) {
    maps_.reserve(maps.size());
    for (auto& map : maps) Append(std::move(map));
    Validate();
  }

  explicit GazeCollection(std::vector<GazeMap> maps) : grid_(FirstGrid(maps)) {
    maps_.reserve(maps.size());
    for (auto& map : maps) Append(std::move(map));
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return maps_.size(); }
  const GazeMap& operator[](std::size_t i) const { return *maps_[i]; }

  Count MaxCount() const {
    Count best = 0;
    for (const auto& map : maps_) best = std::max(best, map->MaxCount());
    return best;
  }

  // Each member repeated `copies` times, in order (G1 x copies, G2 x copies...).
  GazeCollection Replicated(std::size_t copies) const {
    detail::Require(copies >= 1, "replication factor must be at least 1");
    GazeCollection out(grid_);
    out.maps_.reserve(maps_.size() * copies);
    for (const auto& map : maps_) {
      for (std::size_t k = 0; k < copies; ++k) out.maps_.push_back(map);
    }
    return out;
  }

  // Collection without member `index` (the adversary's background set).
  GazeCollection Without(std::size_t index) const {
    detail::Require(index < maps_.size(), "observer index out of range");
    GazeCollection out(grid_);
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (i != index) out.maps_.push_back(maps_[i]);
    }
    return out;
  }

  // An empty collection is only representable through this factory; it is
  // meaningful as the background set of a single-observer release.
  static GazeCollection Empty(GridSpec grid) { return GazeCollection(grid); }

  bool empty() const { return maps_.empty(); }

 private:
  explicit GazeCollection(GridSpec grid) : grid_(grid) {}

  static GridSpec FirstGrid(const std::vector<GazeMap>& maps) {
    detail::Require(!maps.empty(), "gaze collection must not be empty");
    return maps.front().grid();
  }

  void Append(GazeMap map) {
    detail::Require(map.grid() == grid_,
                    "gaze map grid " + map.grid().ToString() +
                        " does not match collection grid " + grid_.ToString());
    maps_.push_back(std::make_shared<const GazeMap>(std::move(map)));
  }

  void Validate() const {
    detail::Require(!maps_.empty(), "gaze collection must not be empty");
  }

  GridSpec grid_;
  std::vector<std::shared_ptr<const GazeMap>> maps_;
};

// Real-valued per-pixel map normalized by the number of contributing
// observers. Noisy releases share this type and carry no range invariant.
class AggregateMap {
 public:
  AggregateMap(GridSpec grid, std::vector<double> values,
               std::size_t normalization)
      : grid_(grid), values_(std::move(values)), normalization_(normalization) {
    detail::Require(values_.size() == grid_.pixels(),
                    "aggregate map size does not match grid");
    detail::Require(normalization_ >= 1, "aggregate normalization must be >= 1");
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t pixel) const { return values_[pixel]; }
  std::size_t normalization() const { return normalization_; }

  friend bool operator==(const AggregateMap&, const AggregateMap&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  std::size_t normalization_;
};

// Accumulates fixations into per-pixel counts. A fixation lands in pixel
// (floor(x), floor(y)).
inline GazeMap RasterizeFixations(std::span<const Fixation> fixations,
                                  const GridSpec& grid) {
  std::vector<Count> counts(grid.pixels(), 0);
  for (std::size_t i = 0; i < fixations.size(); ++i) {
    const Fixation& f = fixations[i];
    const bool inside = std::isfinite(f.x) && std::isfinite(f.y) &&
                        f.x >= 0 && f.y >= 0 &&
                        f.x < static_cast<double>(grid.width()) &&
                        f.y < static_cast<double>(grid.height());
    detail::Require(inside, "fixation " + std::to_string(i) + " at (" +
                                std::to_string(f.x) + ", " +
                                std::to_string(f.y) + ") is outside the " +
                                grid.ToString() + " grid");
    detail::Require(f.weight >= 1, "fixation " + std::to_string(i) +
                                       " has non-positive weight");
    const auto px = static_cast<std::size_t>(std::floor(f.x));
    const auto py = static_cast<std::size_t>(std::floor(f.y));
    counts[grid.Index(px, py)] += f.weight;
  }
  return GazeMap(grid, std::move(counts));
}

inline GazeMap CapGazeMap(const GazeMap& map, Count cap) {
  detail::Require(cap >= 1, "cap m must be at least 1");
  std::vector<Count> counts(map.counts().begin(), map.counts().end());
  for (Count& c : counts) c = std::min(c, cap);
  return GazeMap(map.grid(), std::move(counts));
}

inline GazeCollection CapCollection(const GazeCollection& collection,
                                    Count cap) {
  std::vector<GazeMap> capped;
  capped.reserve(collection.size());
  for (std::size_t i = 0; i < collection.size(); ++i) {
    capped.push_back(CapGazeMap(collection[i], cap));
  }
  return GazeCollection(collection.grid(), std::move(capped));
}

// Block-sum downsampling by an integer factor; trailing partial blocks are
// kept, so the output grid is ceil(width/k) x ceil(height/k).
inline GazeMap Downsample(const GazeMap& map, std::size_t factor) {
  detail::Require(factor >= 1, "downsample factor must be at least 1");
  const GridSpec& in = map.grid();
  const GridSpec out((in.width() + factor - 1) / factor,
                     (in.height() + factor - 1) / factor);
  std::vector<Count> counts(out.pixels(), 0);
  for (std::size_t y = 0; y < in.height(); ++y) {
    for (std::size_t x = 0; x < in.width(); ++x) {
      counts[out.Index(x / factor, y / factor)] += map.at(x, y);
    }
  }
  return GazeMap(out, std::move(counts));
}

// values[p] = (1/n) * sum_i counts_i[p]. Sums are exact in 64-bit integers
// before the single division.
inline AggregateMap Aggregate(const GazeCollection& collection) {
  detail::Require(!collection.empty(), "cannot aggregate an empty collection");
  const std::size_t r = collection.grid().pixels();
  std::vector<std::uint64_t> sums(r, 0);
  for (std::size_t i = 0; i < collection.size(); ++i) {
    const auto counts = collection[i].counts();
    for (std::size_t p = 0; p < r; ++p) sums[p] += counts[p];
  }
  const auto n = static_cast<double>(collection.size());
  std::vector<double> values(r);
  for (std::size_t p = 0; p < r; ++p) {
    values[p] = static_cast<double>(sums[p]) / n;
  }
  return AggregateMap(collection.grid(), std::move(values), collection.size());
}

}  // namespace gazedp
