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

// Counter-based random numbers. Every draw is a pure function of
// (seed, substream, counter), so noise for pixel p of trial t can be
// generated in any order, on any thread, with bit-identical results.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gazedp {

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3"). Output matches the Random123 known-answer vectors.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter Generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Purpose tags keep the noise, sampling and synthetic-data streams disjoint
// even when they share a seed and substream.
enum class StreamTag : std::uint32_t {
  kPixelNoise = 0x4e4f4953u,  // "NOIS"
  kSelection = 0x53454c45u,   // "SELE"
  kSynthetic = 0x53594e54u,   // "SYNT"
};

// A 64-bit seed plus a 64-bit substream id (trial index, hypothesis, ...).
struct RngSeed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;

  constexpr RngSeed Substream(std::uint64_t id) const {
    // Mix so that Substream(a).Substream(b) differs from Substream(b).Substream(a).
    return RngSeed{value, stream * 0x9E3779B97F4A7C15ull + id + 1};
  }

  friend constexpr bool operator==(const RngSeed&, const RngSeed&) = default;
};

namespace detail {

// Uniform double in the open interval (0, 1) from 64 random bits.
constexpr double OpenUnit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr std::uint64_t Join(std::uint32_t hi, std::uint32_t lo) {
  return (std::uint64_t{hi} << 32) | lo;
}

}  // namespace detail

// One Philox block addressed by (seed, tag, index, block). Index is the pixel
// for noise streams or the draw position for sequential streams.
inline Philox4x32::Counter RandomBlock(RngSeed seed, StreamTag tag,
                                       std::uint64_t index,
                                       std::uint32_t block = 0) {
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed.value),
                               static_cast<std::uint32_t>(seed.value >> 32)};
  // (stream, block, tag) is hashed by one Philox call into the upper counter
  // words and the key of the final block.
  const auto stream_words = Philox4x32::Generate(
      {static_cast<std::uint32_t>(seed.stream),
       static_cast<std::uint32_t>(seed.stream >> 32), block,
       static_cast<std::uint32_t>(tag)},
      key);
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32),
                                   stream_words[0], stream_words[1]};
  return Philox4x32::Generate(ctr, {stream_words[2], stream_words[3]});
}

// Standard normal draw for one pixel of one substream (Box-Muller, cosine
// branch only, so every pixel consumes exactly one block).
inline double StandardNormalAt(RngSeed seed, std::uint64_t pixel) {
  const auto b = RandomBlock(seed, StreamTag::kPixelNoise, pixel);
  const double u1 = detail::OpenUnit(detail::Join(b[0], b[1]));
  const double u2 = detail::OpenUnit(detail::Join(b[2], b[3]));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Zero-mean Laplace draw with unit standard deviation (scale 1/sqrt(2)) by
// inverse CDF.
inline double StandardLaplaceAt(RngSeed seed, std::uint64_t pixel) {
  const auto b = RandomBlock(seed, StreamTag::kPixelNoise, pixel);
  const double u = detail::OpenUnit(detail::Join(b[0], b[1])) - 0.5;
  const double magnitude = -std::log1p(-2.0 * std::abs(u));
  const double scale = 1.0 / std::numbers::sqrt2;
  return u < 0 ? -scale * magnitude : scale * magnitude;
}

// Sequential 64-bit draws from one substream, for algorithms that consume a
// data-dependent number of values (sampling, synthetic data).
class CounterStream {
 public:
  CounterStream(RngSeed seed, StreamTag tag) : seed_(seed), tag_(tag) {}

  std::uint64_t NextBits() {
    if (cursor_ == 2) {
      block_ = RandomBlock(seed_, tag_, index_++);
      cursor_ = 0;
    }
    const std::uint64_t bits =
        detail::Join(block_[2 * cursor_], block_[2 * cursor_ + 1]);
    ++cursor_;
    return bits;
  }

  double NextUnit() { return detail::OpenUnit(NextBits()); }

  double NextNormal() {
    const double u1 = NextUnit();
    const double u2 = NextUnit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t NextBelow(std::uint64_t bound) {
    __uint128_t product = static_cast<__uint128_t>(NextBits()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<__uint128_t>(NextBits()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  RngSeed seed_;
  StreamTag tag_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter block_{};
  int cursor_ = 2;
};

}  // namespace gazedp
