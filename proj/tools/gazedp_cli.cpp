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

// gazedp: command-line front end for the gaze-map privacy pipeline.
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 invalid input or
// parameters, 3 an audit detected a privacy violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gazedp/gazedp.hpp"
#include "json.hpp"

namespace {

using namespace gazedp;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;

// Raw flag values; a flag only overrides the config file when given.
struct Flags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string grid;
  unsigned threads = 0;

  std::string fixations;
  std::vector<std::string> maps;
  std::size_t downsample = 1;
  std::size_t replicate = 1;

  std::string preset;
  double epsilon = 0;
  double delta = 0;
  std::string mechanism = "gaussian";
  std::string cap = "1";
  double psf_sigma = 3.0;
  std::size_t trials = 100;

  std::string out;
  std::string out_dir;
  std::string render;
  std::string aggregate;

  // synth
  std::size_t observers = 5;
  std::size_t fixations_per_observer = 400;

  // audit
  std::string attack = "additive";
  std::size_t target = 0;
  std::size_t n = 10;
  std::size_t r = 1;
  double fraction = 0.3;
  bool with_replacement = false;
  double noise_scale = 1.0;

  // sweep
  std::vector<double> epsilons = {0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<std::string> kinds = {"gaussian", "laplacian"};
  std::string stage = "aggregate";
  bool control = false;
};

bool Given(const CLI::App& app, const std::string& name) {
  const CLI::App* a = &app;
  while (a) {
    try {
      if (a->count(name) > 0) return true;
    } catch (const CLI::OptionNotFound&) {
    }
    a = a->get_parent();
  }
  return false;
}

// Config file first, then any flag given on the command line.
RunConfig ResolveConfig(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : LoadRunConfig(f.config_path);
  if (Given(sub, "--seed")) c.seed = f.seed;
  if (Given(sub, "--grid")) c.grid = ParseGrid(f.grid);
  if (Given(sub, "--preset")) {
    c.preset = f.preset;
    c.epsilon.reset();
    c.delta.reset();
  }
  if (Given(sub, "--epsilon")) {
    c.epsilon = f.epsilon;
    c.preset.reset();
  }
  if (Given(sub, "--delta")) c.delta = f.delta;
  if (Given(sub, "--mechanism")) c.mechanism = ParseNoiseKind(f.mechanism);
  if (Given(sub, "--cap")) {
    if (f.cap == "auto") {
      c.cap.reset();
    } else {
      Count m = 0;
      detail::Require(detail::ParseNumber(std::string_view(f.cap), m) && m >= 1,
                      "--cap must be a positive integer or 'auto'");
      c.cap = m;
    }
  }
  if (Given(sub, "--psf-sigma")) c.psf_sigma = f.psf_sigma;
  if (Given(sub, "--trials")) c.trials = f.trials;
  if (Given(sub, "--downsample")) c.downsample = f.downsample;
  if (Given(sub, "--replicate")) c.replicate = f.replicate;
  if (Given(sub, "--out")) c.outputs["out"] = f.out;
  if (Given(sub, "--render")) c.outputs["render"] = f.render;
  c.Validate();
  return c;
}

Parallelism Threads(const Flags& f) { return Parallelism{f.threads}; }

// Observer maps from --fixations (rasterized on the config grid) or --maps,
// then block-summed and replicated as configured.
GazeCollection LoadCollection(const Flags& f, const RunConfig& c) {
  detail::Require(f.fixations.empty() != f.maps.empty(),
                  "give exactly one of --fixations or --maps");
  std::vector<GazeMap> maps;
  if (!f.fixations.empty()) {
    detail::Require(c.grid.has_value(), "--fixations needs --grid WxH");
    for (const auto& obs : LoadFixations(f.fixations)) {
      maps.push_back(RasterizeFixations(obs.fixations, *c.grid));
    }
  } else {
    for (const auto& path : f.maps) {
      maps.push_back(LoadGazeMap(path));
      detail::Require(!c.grid || maps.back().grid() == *c.grid,
                      path + " has grid " + maps.back().grid().ToString() +
                          ", expected " + (c.grid ? c.grid->ToString() : ""));
    }
  }
  if (c.downsample > 1) {
    for (auto& m : maps) m = Downsample(m, c.downsample);
  }
  GazeCollection collection(std::move(maps));
  return c.replicate > 1 ? collection.Replicated(c.replicate) : collection;
}

std::string Num(double v) { return detail::FormatReal(v); }

void WriteText(const std::string& path, const std::string& text) {
  auto out = detail::OpenForWrite(path);
  out << text;
  detail::FinishWrite(out, path);
}

// JSON to `path`, or stdout when empty.
void Emit(const ordered_json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    WriteText(path, text);
  }
}

std::string Output(const RunConfig& c, const std::string& key) {
  const auto it = c.outputs.find(key);
  return it == c.outputs.end() ? std::string() : it->second;
}

int RunSynth(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  detail::Require(c.grid.has_value(), "synth needs --grid WxH");
  SyntheticOptions opts;
  opts.observers = f.observers;
  opts.fixations_per_observer = f.fixations_per_observer;
  opts.seed = RngSeed{c.seed};
  const auto obs = SynthesizeFixations(*c.grid, opts);
  std::ostringstream text;
  WriteFixationsCsv(text, obs);
  const std::string path = Output(c, "out");
  if (path.empty()) {
    std::cout << text.str();
  } else {
    WriteText(path, text.str());
    std::cerr << "wrote " << obs.size() << " observers to " << path << "\n";
  }
  return kExitOk;
}

int RunRasterize(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  detail::Require(!f.out_dir.empty(), "rasterize needs --out-dir");
  detail::Require(!f.fixations.empty(), "rasterize needs --fixations");
  detail::Require(c.grid.has_value(), "rasterize needs --grid WxH");
  std::filesystem::create_directories(f.out_dir);
  std::size_t i = 0;
  for (const auto& obs : LoadFixations(f.fixations)) {
    GazeMap map = RasterizeFixations(obs.fixations, *c.grid);
    if (c.downsample > 1) map = Downsample(map, c.downsample);
    const std::string path =
        (std::filesystem::path(f.out_dir) / (obs.observer_id + ".txt")).string();
    SaveGazeMap(path, map);
    std::cout << path << "\n";
    ++i;
  }
  std::cerr << "rasterized " << i << " observers\n";
  return kExitOk;
}

int RunAggregate(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  GazeCollection collection = LoadCollection(f, c);
  // Uncapped unless a cap is requested explicitly.
  if (Given(sub, "--cap") && c.cap) collection = CapCollection(collection, *c.cap);
  const AggregateMap agg = MechNoiseFree(collection);
  const std::string out = Output(c, "out");
  detail::Require(!out.empty(), "aggregate needs --out");
  SaveAggregateMap(out, agg);
  if (const auto pgm = Output(c, "render"); !pgm.empty()) {
    RenderHeatmap(ConvolveHeatmap(agg, c.psf_sigma), pgm);
  }
  std::cout << "observers " << collection.size() << "\n";
  std::cout << "warning: the noise-free aggregate is not differentially private\n";
  return kExitOk;
}

// sigma* for optimize-cap: the m = 1 calibration, using linearity in m.
double SigmaStar(const PrivacyLevel& level, const GazeCollection& c) {
  return CalibrateGaussian(level, c.size(), c.grid().pixels(), 1).sigma();
}

int RunPrivatize(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  const GazeCollection collection = LoadCollection(f, c);
  const std::size_t n = collection.size(), r = collection.grid().pixels();
  const PrivacyLevel level = c.Privacy(n);
  Count m = 1;
  if (c.cap_auto()) {
    m = OptimizeCap(collection, SigmaStar(level, collection)).m_star;
  } else {
    m = *c.cap;
  }
  const NoiseCalibration cal = c.mechanism == NoiseKind::kGaussian
                                   ? CalibrateGaussian(level, n, r, m)
                                   : CalibrateLaplacian(level.epsilon(), n, r, m);
  const AggregateMap released =
      MechAdditive(CapCollection(collection, m), cal, RngSeed{c.seed}, Threads(f));
  const std::string out = Output(c, "out");
  detail::Require(!out.empty(), "privatize needs --out");
  SaveAggregateMap(out, released);
  if (const auto pgm = Output(c, "render"); !pgm.empty()) {
    RenderHeatmap(ClampForDisplay(ConvolveHeatmap(released, c.psf_sigma)), pgm);
  }
  std::cout << "mechanism " << NoiseKindName(cal.kind()) << "\n"
            << "epsilon " << Num(level.epsilon()) << "\n"
            << "delta " << Num(cal.derived_from().delta) << "\n"
            << "observers " << n << "\n"
            << "pixels " << r << "\n"
            << "cap " << m << (c.cap_auto() ? " (auto)" : "") << "\n"
            << "sigma " << Num(cal.sigma()) << "\n";
  return kExitOk;
}

int RunOptimizeCap(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  const GazeCollection collection = LoadCollection(f, c);
  const PrivacyLevel level = c.Privacy(collection.size());
  const auto result = OptimizeCap(collection, SigmaStar(level, collection));
  ordered_json j;
  j["epsilon"] = level.epsilon();
  j["delta"] = level.delta();
  j["sigma_star"] = result.sigma_star;
  j["g_max"] = result.g_max;
  j["m_star"] = result.m_star;
  j["degenerate"] = result.degenerate;
  j["work"] = result.work;
  j["expected_mse_by_m"] = result.expected_mse_by_m;
  Emit(j, Output(c, "out"));
  if (result.degenerate) {
    std::cerr << "all maps are zero; every cap is vacuous, using m = 1\n";
  }
  return kExitOk;
}

int RunAudit(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  const RngSeed seed{c.seed};
  ordered_json j;
  bool violated = false;
  if (f.attack == "reconstruction") {
    const GazeCollection collection = LoadCollection(f, c);
    const auto report = AttackNoiseFree(collection, f.target);
    violated = report.exact_recovery.value_or(false);
    j["attack"] = "reconstruction";
    j["mechanism"] = report.mechanism;
    j["target"] = f.target;
    j["exact_recovery"] = violated;
    j["notes"] = report.notes;
  } else if (f.attack == "selection") {
    const GridSpec pixel(1, 1);
    const GazeCollection world(pixel, std::vector<GazeMap>(f.n, GazeMap(pixel)));
    const auto report =
        AttackRandomSelection(world, SelectionConfig(f.fraction, f.with_replacement),
                              f.target, c.trials, seed, Threads(f));
    // An event possible under one hypothesis and impossible under the other
    // rules out every finite epsilon.
    violated = report.looked_frequency > 0 && report.not_looked_frequency == 0;
    j["attack"] = "selection";
    j["mechanism"] = report.mechanism;
    j["trials"] = report.trials;
    j["looked_frequency"] = report.looked_frequency;
    j["not_looked_frequency"] = report.not_looked_frequency;
    j["advantage"] = report.advantage;
    j["notes"] = report.notes;
  } else if (f.attack == "additive") {
    const Count m = c.cap.value_or(1);
    detail::Require(c.has_privacy(), "audit additive needs --preset or --epsilon");
    const PrivacyLevel level = c.Privacy(f.n);
    const NoiseCalibration cal =
        c.mechanism == NoiseKind::kGaussian
            ? CalibrateGaussian(level, f.n, f.r, m)
            : CalibrateLaplacian(level.epsilon(), f.n, f.r, m);
    AuditOptions opts;
    opts.noise_scale = f.noise_scale;
    opts.par = Threads(f);
    const auto report =
        AuditAdditiveMechanism(c.mechanism, cal, f.n, f.r, m, c.trials, seed, opts);
    violated = report.Violated();
    j["attack"] = "additive";
    j["mechanism"] = std::string(NoiseKindName(c.mechanism));
    j["epsilon"] = report.epsilon;
    j["delta"] = report.delta;
    j["sigma"] = report.sigma;
    j["n"] = f.n;
    j["r"] = f.r;
    j["m"] = m;
    j["trials"] = report.trials;
    j["worst_margin"] = report.worst_margin;
    j["worst_margin_se"] = report.worst_margin_se;
    j["worst_threshold"] = report.worst_threshold;
    j["worst_tail"] = report.worst_tail == ThresholdTail::kUpper ? "upper" : "lower";
    j["worst_swapped"] = report.worst_swapped;
    j["event_family"] = report.event_family;
    j["confidence_note"] = report.confidence_note;
  } else {
    throw Error(ErrorCode::kInvalidParameter,
                "unknown attack '" + f.attack +
                    "' (expected reconstruction, selection or additive)");
  }
  j["violation_detected"] = violated;
  Emit(j, Output(c, "out"));
  return violated ? kExitViolation : kExitOk;
}

int RunSweep(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  const GazeCollection collection = LoadCollection(f, c);
  SweepOptions opts;
  opts.epsilons = f.epsilons;
  opts.kinds.clear();
  for (const auto& k : f.kinds) opts.kinds.push_back(ParseNoiseKind(k));
  detail::Require(c.cap.has_value(), "sweep needs an explicit --cap");
  opts.m = *c.cap;
  opts.trials = c.trials;
  opts.seed = RngSeed{c.seed};
  opts.include_no_noise_control = f.control;
  detail::Require(f.stage == "aggregate" || f.stage == "heatmap",
                  "--stage must be aggregate or heatmap");
  opts.stage = f.stage == "heatmap" ? ScoreStage::kHeatmap : ScoreStage::kAggregate;
  opts.psf_sigma = c.psf_sigma;
  opts.par = Threads(f);
  const auto rows = TradeoffSweep(collection, opts);
  std::ostringstream csv;
  WriteSweepCsv(csv, rows);
  const std::string out = Output(c, "out");
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    WriteText(out, csv.str());
  }
  return kExitOk;
}

int RunRender(const CLI::App& sub, const Flags& f) {
  const RunConfig c = ResolveConfig(sub, f);
  detail::Require(!f.aggregate.empty(), "render needs --aggregate");
  const std::string out = Output(c, "out");
  detail::Require(!out.empty(), "render needs --out");
  const AggregateMap agg = LoadAggregateMap(f.aggregate);
  RenderHeatmap(ClampForDisplay(ConvolveHeatmap(agg, c.psf_sigma)), out);
  return kExitOk;
}

void AddInputs(CLI::App* sub, Flags& f) {
  sub->add_option("--fixations", f.fixations, "fixation CSV (observer_id,x,y[,weight])");
  sub->add_option("--maps", f.maps, "gaze map files, one per observer");
  sub->add_option("--downsample", f.downsample, "block-sum factor k")->check(CLI::PositiveNumber);
  sub->add_option("--replicate", f.replicate, "repeat each observer k times")
      ->check(CLI::PositiveNumber);
}

void AddPrivacy(CLI::App* sub, Flags& f) {
  sub->add_option("--preset", f.preset, "named privacy level: okay or good");
  sub->add_option("--epsilon", f.epsilon, "explicit epsilon");
  sub->add_option("--delta", f.delta, "explicit delta (default n^-1.5)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private aggregation of eye-tracking gaze maps"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_path, "JSON run configuration");
  app.add_option("--seed", f.seed, "root random seed");
  app.add_option("--grid", f.grid, "grid as WIDTHxHEIGHT");
  app.add_option("--threads", f.threads, "worker threads (0 = all cores)");
  app.fallthrough();

  auto* synth = app.add_subcommand("synth", "write synthetic fixations");
  synth->add_option("--observers", f.observers, "observer count");
  synth->add_option("--per-observer", f.fixations_per_observer, "fixations each");
  synth->add_option("--out", f.out, "output CSV (default stdout)");

  auto* rasterize = app.add_subcommand("rasterize", "fixations to per-observer gaze maps");
  rasterize->add_option("--fixations", f.fixations, "fixation CSV")->required();
  rasterize->add_option("--out-dir", f.out_dir, "directory for the maps")->required();
  rasterize->add_option("--downsample", f.downsample, "block-sum factor k");

  auto* aggregate = app.add_subcommand("aggregate", "noise-free aggregated map");
  AddInputs(aggregate, f);
  aggregate->add_option("--cap", f.cap, "per-pixel cap m");
  aggregate->add_option("--out", f.out, "aggregate map output");
  aggregate->add_option("--render", f.render, "optional heatmap PGM");
  aggregate->add_option("--psf-sigma", f.psf_sigma, "point-spread sigma in pixels");

  auto* privatize = app.add_subcommand("privatize", "calibrate and release a noisy aggregate");
  AddInputs(privatize, f);
  AddPrivacy(privatize, f);
  privatize->add_option("--mechanism", f.mechanism, "gaussian or laplacian");
  privatize->add_option("--cap", f.cap, "per-pixel cap m, or auto");
  privatize->add_option("--out", f.out, "released aggregate map");
  privatize->add_option("--render", f.render, "optional heatmap PGM");
  privatize->add_option("--psf-sigma", f.psf_sigma, "point-spread sigma in pixels");

  auto* optimize = app.add_subcommand("optimize-cap", "choose m by expected MSE");
  AddInputs(optimize, f);
  AddPrivacy(optimize, f);
  optimize->add_option("--out", f.out, "JSON report (default stdout)");

  auto* audit = app.add_subcommand("audit", "attacks and DP audits");
  audit->add_option("attack", f.attack, "reconstruction, selection or additive")
      ->required();
  AddInputs(audit, f);
  AddPrivacy(audit, f);
  audit->add_option("--mechanism", f.mechanism, "gaussian or laplacian (additive)");
  audit->add_option("--cap", f.cap, "cap m (additive)");
  audit->add_option("--target", f.target, "target observer index");
  audit->add_option("--n", f.n, "observer count (selection, additive)");
  audit->add_option("--r", f.r, "pixel count (additive)");
  audit->add_option("--fraction", f.fraction, "sampling fraction c (selection)");
  audit->add_flag("--with-replacement", f.with_replacement, "rs2 instead of rs1");
  audit->add_option("--trials", f.trials, "Monte Carlo trials");
  audit->add_option("--noise-scale", f.noise_scale, "audit sigma times this factor");
  audit->add_option("--out", f.out, "JSON report (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "privacy-utility sweep to CSV");
  AddInputs(sweep, f);
  sweep->add_option("--epsilons", f.epsilons, "epsilon values")->delimiter(',');
  sweep->add_option("--kinds", f.kinds, "mechanisms")->delimiter(',');
  sweep->add_option("--cap", f.cap, "per-pixel cap m");
  sweep->add_option("--trials", f.trials, "releases per cell");
  sweep->add_option("--stage", f.stage, "aggregate or heatmap");
  sweep->add_option("--psf-sigma", f.psf_sigma, "point-spread sigma for heatmap stage");
  sweep->add_flag("--control", f.control, "add a sigma = 0 row per kind");
  sweep->add_option("--out", f.out, "CSV output (default stdout)");

  auto* render = app.add_subcommand("render", "aggregate map to heatmap PGM");
  render->add_option("--aggregate", f.aggregate, "aggregate map file")->required();
  render->add_option("--psf-sigma", f.psf_sigma, "point-spread sigma in pixels");
  render->add_option("--out", f.out, "output PGM")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*synth) return RunSynth(*synth, f);
    if (*rasterize) return RunRasterize(*rasterize, f);
    if (*aggregate) return RunAggregate(*aggregate, f);
    if (*privatize) return RunPrivatize(*privatize, f);
    if (*optimize) return RunOptimizeCap(*optimize, f);
    if (*audit) return RunAudit(*audit, f);
    if (*sweep) return RunSweep(*sweep, f);
    if (*render) return RunRender(*render, f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIo ? kExitIo : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInvalid;
}
