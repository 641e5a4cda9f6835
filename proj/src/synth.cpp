#include "sctracker/synth.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace sct::synth {

namespace {

bool isProbability(double p) { return p >= 0.0 && p <= 1.0; }

struct Visible {
  std::int64_t id;
  BoundingBox box;
};

double intersectionArea(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
}

// Objects whose bottom edge is lower in the image are closer to the camera.
double occludedFraction(const std::vector<Visible>& visible, std::size_t index) {
  const BoundingBox& self = visible[index].box;
  double fraction = 0.0;
  for (std::size_t k = 0; k < visible.size(); ++k) {
    if (k == index || !(visible[k].box.bottom() > self.bottom())) continue;
    fraction = std::max(fraction, intersectionArea(self, visible[k].box) / self.area());
  }
  return std::min(fraction, 1.0);
}

}  // namespace

void ScenarioSpec::validate() const {
  if (frames < 1) throw std::invalid_argument("scenario needs at least one frame");
  if (!isProbability(dropout_prob)) throw std::invalid_argument("dropout_prob must lie in [0, 1]");
  if (!(false_positive_rate >= 0.0)) {
    throw std::invalid_argument("false_positive_rate must be non-negative");
  }
  if (!(noise_std_px >= 0.0)) throw std::invalid_argument("noise_std_px must be non-negative");
  if (!(confidence.jitter_std >= 0.0) || !(confidence.occlusion_slope >= 0.0) ||
      !isProbability(confidence.truncation_gain) || !isProbability(confidence.base)) {
    throw std::invalid_argument("invalid confidence model");
  }
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw std::invalid_argument("image size must be positive");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& b = objects[i].initial;
    if (!b.valid()) throw std::invalid_argument(fmt::format("object {} has an invalid box", i + 1));
    if (b.x < 0.0 || b.y < 0.0 || b.right() > image_width || b.bottom() > image_height) {
      throw std::invalid_argument(fmt::format("object {} starts outside the image", i + 1));
    }
    if (!std::isfinite(objects[i].vx) || !std::isfinite(objects[i].vy)) {
      throw std::invalid_argument(fmt::format("object {} has a non-finite velocity", i + 1));
    }
  }
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();

  std::mt19937_64 rng(spec.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Scenario out;
  for (int frame = 1; frame <= spec.frames; ++frame) {
    const double t = frame - 1;

    std::vector<Visible> visible;
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
      const auto& o = spec.objects[i];
      const double x1 = std::clamp(o.initial.x + o.vx * t, 0.0, spec.image_width);
      const double y1 = std::clamp(o.initial.y + o.vy * t, 0.0, spec.image_height);
      const double x2 = std::clamp(o.initial.right() + o.vx * t, 0.0, spec.image_width);
      const double y2 = std::clamp(o.initial.bottom() + o.vy * t, 0.0, spec.image_height);
      if (x2 - x1 < 1.0 || y2 - y1 < 1.0) continue;
      visible.push_back({static_cast<std::int64_t>(i + 1), BoundingBox::fromXyxy(x1, y1, x2, y2)});
    }

    auto& gt_frame = out.ground_truth[frame];
    auto& det_frame = out.detections[frame];
    for (std::size_t k = 0; k < visible.size(); ++k) {
      gt_frame.push_back({visible[k].id, visible[k].box, true});

      // Fixed draw order per object keeps streams aligned across specs.
      const double drop = uniform(rng);
      double corner[4];
      for (double& c : corner) c = normal(rng);
      const double jitter = std::abs(normal(rng)) * spec.confidence.jitter_std;
      if (drop < spec.dropout_prob) continue;

      const BoundingBox& truth = visible[k].box;
      const double occluded = occludedFraction(visible, k);
      const double kept_height = truth.h * (1.0 - spec.confidence.truncation_gain * occluded);

      double x1 = truth.x + spec.noise_std_px * corner[0];
      double y1 = truth.y + spec.noise_std_px * corner[1];
      double x2 = truth.right() + spec.noise_std_px * corner[2];
      double y2 = truth.y + kept_height + spec.noise_std_px * corner[3];
      x2 = std::max(x2, x1 + 1.0);
      y2 = std::max(y2, y1 + 1.0);

      const double score = std::clamp(
          spec.confidence.base - spec.confidence.occlusion_slope * occluded - jitter, 0.0, 1.0);
      const bool untouched = spec.noise_std_px == 0.0 && occluded == 0.0;
      det_frame.push_back({untouched ? truth : BoundingBox::fromXyxy(x1, y1, x2, y2), score});
    }

    if (spec.false_positive_rate > 0.0) {
      std::poisson_distribution<int> poisson(spec.false_positive_rate);
      const int count = poisson(rng);
      for (int n = 0; n < count; ++n) {
        const double w = 20.0 + 180.0 * uniform(rng);
        const double h = 40.0 + 260.0 * uniform(rng);
        const double x = (spec.image_width - w) * uniform(rng);
        const double y = (spec.image_height - h) * uniform(rng);
        const double score = 0.05 + 0.7 * uniform(rng);
        det_frame.push_back({BoundingBox::fromTlwh(x, y, w, h), score});
      }
    }
  }
  return out;
}

std::vector<ScenarioSpec> builtinScenarios() {
  std::vector<ScenarioSpec> specs;

  {
    ScenarioSpec s;
    s.name = "straight_clean";
    s.frames = 50;
    s.objects = {{BoundingBox::fromTlwh(100, 200, 60, 150), 5.0, 0.0},
                 {BoundingBox::fromTlwh(100, 600, 60, 150), 5.0, 0.0}};
    s.confidence = {1.0, 1.2, 0.0, 0.5};
    specs.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "crossing_same_shape";
    s.frames = 80;
    s.objects = {{BoundingBox::fromTlwh(400, 400, 70, 140), 8.0, 0.0},
                 {BoundingBox::fromTlwh(1000, 410, 70, 140), -8.0, 0.0}};
    s.noise_std_px = 2.0;
    s.dropout_prob = 0.05;
    s.false_positive_rate = 0.3;
    specs.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "crossing_distinct_shape";
    s.frames = 80;
    // 1:2 (tall) and 2:1 (wide) boxes crossing.
    s.objects = {{BoundingBox::fromTlwh(400, 400, 70, 140), 8.0, 0.0},
                 {BoundingBox::fromTlwh(1000, 440, 140, 70), -8.0, 0.0}};
    s.noise_std_px = 2.0;
    s.dropout_prob = 0.05;
    s.false_positive_rate = 0.3;
    specs.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "occlusion_lowconf";
    s.frames = 100;
    // The walker passes behind the standing object, which covers the lower
    // part of it.
    s.objects = {{BoundingBox::fromTlwh(800, 300, 120, 300), 0.0, 0.0},
                 {BoundingBox::fromTlwh(450, 200, 100, 240), 6.0, 0.0}};
    s.noise_std_px = 2.0;
    s.dropout_prob = 0.02;
    s.false_positive_rate = 0.3;
    specs.push_back(s);
  }
  return specs;
}

std::vector<std::string> builtinNames() {
  std::vector<std::string> names;
  for (const auto& s : builtinScenarios()) names.push_back(s.name);
  return names;
}

ScenarioSpec builtinScenario(const std::string& name, std::uint64_t seed) {
  for (auto s : builtinScenarios()) {
    if (s.name == name) {
      s.rng_seed = seed;
      return s;
    }
  }
  std::string valid;
  for (const auto& n : builtinNames()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument(fmt::format("unknown scenario '{}' (valid: {})", name, valid));
}

nlohmann::json toJson(const ScenarioSpec& spec) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : spec.objects) {
    objects.push_back({{"tlwh", {o.initial.x, o.initial.y, o.initial.width(), o.initial.h}},
                       {"velocity", {o.vx, o.vy}}});
  }
  return {
      {"name", spec.name},
      {"frames", spec.frames},
      {"objects", objects},
      {"noise_std_px", spec.noise_std_px},
      {"dropout_prob", spec.dropout_prob},
      {"false_positive_rate", spec.false_positive_rate},
      {"confidence_model",
       {{"base", spec.confidence.base},
        {"occlusion_slope", spec.confidence.occlusion_slope},
        {"jitter_std", spec.confidence.jitter_std},
        {"truncation_gain", spec.confidence.truncation_gain}}},
      {"rng_seed", spec.rng_seed},
      {"image_size", {spec.image_width, spec.image_height}},
  };
}

ScenarioSpec specFromJson(const nlohmann::json& j) {
  ScenarioSpec s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.frames = j.at("frames").get<int>();
    for (const auto& o : j.at("objects")) {
      const auto tlwh = o.at("tlwh").get<std::vector<double>>();
      const auto vel = o.value("velocity", std::vector<double>{0.0, 0.0});
      if (tlwh.size() != 4 || vel.size() != 2) {
        throw std::invalid_argument("object needs tlwh[4] and velocity[2]");
      }
      s.objects.push_back({BoundingBox::fromTlwh(tlwh[0], tlwh[1], tlwh[2], tlwh[3]), vel[0], vel[1]});
    }
    s.noise_std_px = j.value("noise_std_px", 0.0);
    s.dropout_prob = j.value("dropout_prob", 0.0);
    s.false_positive_rate = j.value("false_positive_rate", 0.0);
    if (j.contains("confidence_model")) {
      const auto& c = j.at("confidence_model");
      s.confidence.base = c.value("base", s.confidence.base);
      s.confidence.occlusion_slope = c.value("occlusion_slope", s.confidence.occlusion_slope);
      s.confidence.jitter_std = c.value("jitter_std", s.confidence.jitter_std);
      s.confidence.truncation_gain = c.value("truncation_gain", s.confidence.truncation_gain);
    }
    s.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("image_size")) {
      const auto size = j.at("image_size").get<std::vector<double>>();
      if (size.size() != 2) throw std::invalid_argument("image_size needs two values");
      s.image_width = size[0];
      s.image_height = size[1];
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("bad scenario json: {}", e.what()));
  }
  s.validate();
  return s;
}

void writeScenario(const std::filesystem::path& dir, const ScenarioSpec& spec,
                   const Scenario& scenario) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw motio::IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  }
  motio::writeGroundTruth(dir / "gt.txt", scenario.ground_truth);
  motio::writeDetections(dir / "det.txt", scenario.detections);

  const auto meta = dir / "scenario.json";
  std::ofstream out(meta, std::ios::binary | std::ios::trunc);
  if (!out) throw motio::IoError(fmt::format("cannot open '{}' for writing", meta.string()));
  out << toJson(spec).dump(2) << '\n';
  if (!out) throw motio::IoError(fmt::format("failed writing '{}'", meta.string()));
}

}  // namespace sct::synth
