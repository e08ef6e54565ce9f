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

// Run configuration shared by the CLI subcommands, loadable from JSON:
//
//   {
//     "grid": {"width": 300, "height": 300},
//     "privacy": {"preset": "good"}            or {"epsilon": 1, "delta": 1e-4},
//     "mechanism": "gaussian",
//     "cap": 1                                 or "auto",
//     "psf_sigma": 3.0,
//     "seed": 42,
//     "trials": 100,
//     "downsample": 1,
//     "replicate": 1,
//     "outputs": {"aggregate": "out.agg", "heatmap": "out.pgm"}
//   }

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/io.hpp"
#include "gazedp/mechanisms.hpp"

namespace gazedp {

struct RunConfig {
  std::optional<GridSpec> grid;
  std::optional<std::string> preset;
  std::optional<double> epsilon;
  // Explicit epsilon without delta uses delta = n^(-3/2).
  std::optional<double> delta;
  NoiseKind mechanism = NoiseKind::kGaussian;
  // Empty means "auto": choose the cap by expected-MSE minimization.
  std::optional<Count> cap = Count{1};
  double psf_sigma = 3.0;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t downsample = 1;
  std::size_t replicate = 1;
  std::map<std::string, std::string> outputs;

  bool cap_auto() const { return !cap.has_value(); }

  void Validate() const {
    detail::Require(!(preset && epsilon),
                    "give either a privacy preset or an explicit epsilon, not both");
    detail::Require(!delta || epsilon, "delta given without epsilon");
    detail::Require(!cap_auto() || mechanism == NoiseKind::kGaussian,
                    "cap \"auto\" requires the gaussian mechanism");
    detail::Require(!cap || *cap >= 1, "cap m must be at least 1");
    detail::Require(psf_sigma > 0, "psf_sigma must be positive");
    detail::Require(downsample >= 1, "downsample factor must be at least 1");
    detail::Require(replicate >= 1, "replicate factor must be at least 1");
    if (preset) ParsePrivacyPreset(*preset);
  }

  bool has_privacy() const { return preset.has_value() || epsilon.has_value(); }

  PrivacyLevel Privacy(std::size_t n) const {
    detail::Require(has_privacy(),
                    "no privacy level given (use --preset or --epsilon)");
    if (preset) return MakePrivacyPreset(*preset, n);
    return PrivacyLevel(*epsilon, delta ? *delta : DeltaForObservers(n));
  }
};

inline GridSpec ParseGrid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  std::size_t w = 0, h = 0;
  if (x == std::string::npos ||
      !detail::ParseNumber(std::string_view(text).substr(0, x), w) ||
      !detail::ParseNumber(std::string_view(text).substr(x + 1), h)) {
    throw Error(ErrorCode::kInvalidParameter,
                "grid must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  return GridSpec(w, h);
}

inline RunConfig RunConfigFromJson(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid = GridSpec(g.at("width").get<std::size_t>(),
                        g.at("height").get<std::size_t>());
    }
    if (j.contains("privacy")) {
      const auto& p = j.at("privacy");
      if (p.contains("preset")) c.preset = p.at("preset").get<std::string>();
      if (p.contains("epsilon")) c.epsilon = p.at("epsilon").get<double>();
      if (p.contains("delta")) c.delta = p.at("delta").get<double>();
    }
    if (j.contains("mechanism")) {
      c.mechanism = ParseNoiseKind(j.at("mechanism").get<std::string>());
    }
    if (j.contains("cap")) {
      const auto& cap = j.at("cap");
      if (cap.is_string()) {
        detail::Require(cap.get<std::string>() == "auto",
                        "cap must be a positive integer or \"auto\"");
        c.cap.reset();
      } else {
        c.cap = cap.get<Count>();
      }
    }
    if (j.contains("psf_sigma")) c.psf_sigma = j.at("psf_sigma").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("downsample")) c.downsample = j.at("downsample").get<std::size_t>();
    if (j.contains("replicate")) c.replicate = j.at("replicate").get<std::size_t>();
    if (j.contains("outputs")) {
      for (const auto& [key, value] : j.at("outputs").items()) {
        c.outputs[key] = value.get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

inline nlohmann::json RunConfigToJson(const RunConfig& c) {
  nlohmann::json j;
  if (c.grid) j["grid"] = {{"width", c.grid->width()}, {"height", c.grid->height()}};
  nlohmann::json privacy = nlohmann::json::object();
  if (c.preset) privacy["preset"] = *c.preset;
  if (c.epsilon) privacy["epsilon"] = *c.epsilon;
  if (c.delta) privacy["delta"] = *c.delta;
  if (!privacy.empty()) j["privacy"] = privacy;
  j["mechanism"] = std::string(NoiseKindName(c.mechanism));
  if (c.cap) {
    j["cap"] = *c.cap;
  } else {
    j["cap"] = "auto";
  }
  j["psf_sigma"] = c.psf_sigma;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["downsample"] = c.downsample;
  j["replicate"] = c.replicate;
  if (!c.outputs.empty()) j["outputs"] = c.outputs;
  return j;
}

inline RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

}  // namespace gazedp
