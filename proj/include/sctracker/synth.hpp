#pragma once

#include "sctracker/motio.hpp"
#include "sctracker/tracker.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sct::synth {

struct ObjectSpec {
  BoundingBox initial;  // at frame 1
  double vx = 0.0;      // pixels per frame
  double vy = 0.0;
};

/// Maps occlusion to detector confidence and box degradation:
///   score = clamp(base - occlusion_slope * occluded - |N(0, jitter_std)|, 0, 1)
/// Occluded boxes lose `truncation_gain * occluded` of their height at the
/// bottom edge.
struct ConfidenceModel {
  double base = 0.99;
  double occlusion_slope = 1.2;
  double jitter_std = 0.05;
  double truncation_gain = 0.5;
};

struct ScenarioSpec {
  std::string name;
  int frames = 1;
  std::vector<ObjectSpec> objects;
  double noise_std_px = 0.0;
  double dropout_prob = 0.0;
  double false_positive_rate = 0.0;  // expected false positives per frame
  ConfidenceModel confidence;
  std::uint64_t rng_seed = 0;
  double image_width = 1920.0;
  double image_height = 1080.0;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

struct Scenario {
  motio::GroundTruthByFrame ground_truth;
  DetectionsByFrame detections;
};

/// Deterministic in (spec, rng_seed). Object ids are 1-based in spec order.
Scenario generate(const ScenarioSpec& spec);

/// straight_clean, crossing_same_shape, crossing_distinct_shape,
/// occlusion_lowconf.
std::vector<ScenarioSpec> builtinScenarios();

/// Throws std::invalid_argument listing valid names when unknown.
ScenarioSpec builtinScenario(const std::string& name, std::uint64_t seed);

std::vector<std::string> builtinNames();

nlohmann::json toJson(const ScenarioSpec& spec);
ScenarioSpec specFromJson(const nlohmann::json& j);

/// Writes gt.txt, det.txt and scenario.json into `dir` (created if needed).
void writeScenario(const std::filesystem::path& dir, const ScenarioSpec& spec,
                   const Scenario& scenario);

}  // namespace sct::synth
