#include "sctracker/cli.hpp"

#include "sctracker/motio.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace sct::cli {

TrackerConfig AblationArm::apply(TrackerConfig base) const {
  base.shape_params.use_height_term = height_term;
  base.shape_params.use_area_term = area_term;
  base.noise_config.use_confidence_noise = confidence_update;
  base.noise_config.use_velocity_blend = confidence_update;
  return base;
}

std::vector<AblationArm> methodArms() {
  return {{"baseline", false, false, false},
          {"shape", true, true, false},
          {"conf", false, false, true},
          {"shape+conf", true, true, true}};
}

std::vector<AblationArm> shapeTermArms() {
  return {{"none", false, false, false},
          {"height", true, false, false},
          {"area", false, true, false},
          {"height+area", true, true, false}};
}

std::vector<AblationRow> runAblation(const std::vector<synth::ScenarioSpec>& scenarios,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::vector<AblationArm>& arms,
                                     const TrackerConfig& base) {
  std::vector<AblationRow> rows;
  for (const auto& arm : arms) rows.push_back({arm, {}, {}});

  for (const auto& scenario : scenarios) {
    for (const auto seed : seeds) {
      auto spec = scenario;
      spec.rng_seed = seed;
      const synth::Scenario data = synth::generate(spec);
      for (auto& row : rows) {
        const auto results = runSequence(data.detections, row.arm.apply(base));
        row.per_run.push_back(metrics::evaluate(data.ground_truth, metrics::fromResults(results)));
      }
    }
  }
  for (auto& row : rows) row.pooled = metrics::combine(row.per_run);
  return rows;
}

std::string formatMethodTable(const std::vector<AblationRow>& rows) {
  std::string out = fmt::format("{:<14}{:>8}{:>8}{:>7}\n", "Methods", "IDF1%", "MOTA%", "IDSW");
  for (const auto& r : rows) {
    out += fmt::format("{:<14}{:>8.1f}{:>8.1f}{:>7}\n", r.arm.label, 100.0 * r.pooled.idf1,
                       100.0 * r.pooled.mota, r.pooled.idsw);
  }
  return out;
}

std::string formatShapeTermTable(const std::vector<AblationRow>& rows) {
  std::string out =
      fmt::format("{:<7}{:<7}{:>8}{:>8}{:>7}\n", "rho_h", "rho_s", "IDF1%", "MOTA%", "IDSW");
  for (const auto& r : rows) {
    out += fmt::format("{:<7}{:<7}{:>8.1f}{:>8.1f}{:>7}\n", r.arm.height_term ? "yes" : "-",
                       r.arm.area_term ? "yes" : "-", 100.0 * r.pooled.idf1,
                       100.0 * r.pooled.mota, r.pooled.idsw);
  }
  return out;
}

namespace {

struct TrackerFlags {
  std::optional<std::string> config_path;
  std::optional<double> high_thresh;
  std::optional<double> low_thresh;
  std::optional<double> new_track_thresh;
  std::optional<double> gate1;
  std::optional<double> gate2;
  std::optional<double> gate_unconfirmed;
  std::optional<int> max_lost;
  std::optional<double> epsilon;
  bool no_shape = false;
  bool no_shape_height = false;
  bool no_shape_area = false;
  bool no_conf = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Key = value tracker config file");
    app->add_option("--high-thresh", high_thresh, "High-confidence detection threshold");
    app->add_option("--low-thresh", low_thresh, "Low-confidence detection threshold");
    app->add_option("--new-track-thresh", new_track_thresh, "Minimum score to start a track");
    app->add_option("--gate1", gate1, "Max cost, first association");
    app->add_option("--gate2", gate2, "Max cost, low-confidence association");
    app->add_option("--gate-unconfirmed", gate_unconfirmed, "Max cost, unconfirmed tracks");
    app->add_option("--max-lost", max_lost, "Frames a lost track is kept");
    app->add_option("--epsilon", epsilon, "Shape term stabilizer");
    app->add_flag("--no-shape", no_shape, "Plain IoU distance");
    app->add_flag("--no-shape-height", no_shape_height, "Drop the height term");
    app->add_flag("--no-shape-area", no_shape_area, "Drop the area term");
    app->add_flag("--no-conf", no_conf, "Standard Kalman update (no confidence weighting)");
  }

  TrackerConfig resolve() const {
    TrackerConfig c;
    if (config_path) {
      c = motio::loadConfig(*config_path, c);
    } else if (const char* env = std::getenv(motio::kConfigEnvVar); env && *env) {
      c = motio::loadConfig(env, c);
    }
    if (high_thresh) c.high_thresh = *high_thresh;
    if (low_thresh) c.low_thresh = *low_thresh;
    if (new_track_thresh) c.new_track_thresh = *new_track_thresh;
    if (gate1) c.match_gate_stage1 = *gate1;
    if (gate2) c.match_gate_stage2 = *gate2;
    if (gate_unconfirmed) c.match_gate_unconfirmed = *gate_unconfirmed;
    if (max_lost) c.max_lost_frames = *max_lost;
    if (epsilon) c.shape_params.epsilon = *epsilon;
    if (no_shape || no_shape_height) c.shape_params.use_height_term = false;
    if (no_shape || no_shape_area) c.shape_params.use_area_term = false;
    if (no_conf) {
      c.noise_config.use_confidence_noise = false;
      c.noise_config.use_velocity_blend = false;
    }
    c.validate();
    return c;
  }
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw motio::IoError(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw motio::IoError(fmt::format("failed writing '{}'", path));
}

int cmdTrack(const std::string& det_path, const std::string& out_path, const TrackerFlags& flags,
             std::ostream& out) {
  const TrackerConfig config = flags.resolve();
  const auto dets = motio::readDetections(det_path);
  std::vector<double> millis;
  const auto results = runSequence(dets.frames, config, &millis);
  motio::writeResults(out_path, results);

  std::size_t boxes = 0;
  for (const auto& r : results) boxes += r.outputs.size();
  double total = 0.0;
  for (const double m : millis) total += m;
  out << fmt::format("tracked {} frames, {} output boxes -> {}\n", results.size(), boxes,
                     out_path);
  if (dets.rejected_rows || dets.clamped_scores) {
    out << fmt::format("input: {} rows rejected, {} scores clamped\n", dets.rejected_rows,
                       dets.clamped_scores);
  }
  out << fmt::format("association time per frame: mean {:.3f} ms, median {:.3f} ms, max {:.3f} ms\n",
                     millis.empty() ? 0.0 : total / static_cast<double>(millis.size()),
                     median(millis),
                     millis.empty() ? 0.0 : *std::max_element(millis.begin(), millis.end()));
  return 0;
}

int cmdEval(const std::string& gt_path, const std::string& res_path,
            const std::optional<std::string>& report_path, double iou_thresh, std::ostream& out) {
  const auto gt = motio::readGroundTruth(gt_path);
  const auto results = motio::readResults(res_path);
  const auto report = metrics::evaluate(gt.frames, metrics::fromResults(results), iou_thresh);
  out << metrics::formatReport(report);
  if (report_path) {
    writeText(*report_path, metrics::csvHeader() + "\n" + metrics::formatCsvRow(report) + "\n");
  }
  return 0;
}

int cmdSynth(const std::optional<std::string>& name, const std::optional<std::string>& spec_file,
             std::uint64_t seed, bool seed_given, const std::string& out_dir, std::ostream& out) {
  synth::ScenarioSpec spec;
  if (spec_file) {
    std::ifstream in(*spec_file);
    if (!in) throw motio::IoError(fmt::format("cannot open '{}' for reading", *spec_file));
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(fmt::format("{}: {}", *spec_file, e.what()));
    }
    spec = synth::specFromJson(j);
    if (seed_given) spec.rng_seed = seed;
  } else {
    spec = synth::builtinScenario(name.value_or("crossing_distinct_shape"), seed);
  }
  const auto scenario = synth::generate(spec);
  synth::writeScenario(out_dir, spec, scenario);
  out << fmt::format("wrote scenario '{}' (seed {}, {} frames) to {}\n", spec.name, spec.rng_seed,
                     spec.frames, out_dir);
  return 0;
}

int cmdAblate(const std::vector<std::string>& names, std::uint64_t first_seed, int num_seeds,
              bool shape_terms, const std::optional<std::string>& csv_path,
              const TrackerFlags& flags, std::ostream& out) {
  if (num_seeds < 1) throw std::invalid_argument("--num-seeds must be >= 1");
  const TrackerConfig base = flags.resolve();
  std::vector<synth::ScenarioSpec> specs;
  for (const auto& n : names) specs.push_back(synth::builtinScenario(n, first_seed));
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < num_seeds; ++i) seeds.push_back(first_seed + static_cast<std::uint64_t>(i));

  const auto rows = runAblation(specs, seeds, shape_terms ? shapeTermArms() : methodArms(), base);

  std::string scenario_list;
  for (const auto& n : names) scenario_list += (scenario_list.empty() ? "" : ", ") + n;
  out << fmt::format("scenarios: {}; seeds {}..{}\n", scenario_list, first_seed,
                     first_seed + static_cast<std::uint64_t>(num_seeds) - 1);
  out << (shape_terms ? formatShapeTermTable(rows) : formatMethodTable(rows));

  if (csv_path) {
    std::string csv = "arm,height_term,area_term,confidence_update,idf1,mota,idsw,fp,fn,gt_count\n";
    for (const auto& r : rows) {
      csv += fmt::format("{},{},{},{},{:.17g},{:.17g},{},{},{},{}\n", r.arm.label,
                         int(r.arm.height_term), int(r.arm.area_term),
                         int(r.arm.confidence_update), r.pooled.idf1, r.pooled.mota,
                         r.pooled.idsw, r.pooled.fp, r.pooled.fn, r.pooled.gt_count);
    }
    writeText(*csv_path, csv);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shape- and confidence-aware multi-object tracker"};
  app.require_subcommand(1);

  TrackerFlags track_flags;
  std::string det_path, track_out;
  auto* track = app.add_subcommand("track", "Track a MOTChallenge detection file");
  track->add_option("--detections", det_path, "det.txt input")->required();
  track->add_option("--output", track_out, "Result file")->required();
  track_flags.attach(track);

  std::string gt_path, res_path;
  std::optional<std::string> report_path;
  double iou_thresh = 0.5;
  auto* eval = app.add_subcommand("eval", "Score a result file against ground truth");
  eval->add_option("--gt", gt_path, "gt.txt")->required();
  eval->add_option("--res", res_path, "Result file")->required();
  eval->add_option("--output", report_path, "Write the report as CSV");
  eval->add_option("--iou", iou_thresh, "IoU needed for a correspondence")->capture_default_str();

  std::optional<std::string> scenario_name, scenario_file;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  auto* scen_opt = synth_cmd->add_option("--scenario", scenario_name, "Builtin scenario name");
  synth_cmd->add_option("--scenario-file", scenario_file, "Scenario JSON")->excludes(scen_opt);
  auto* seed_opt = synth_cmd->add_option("--seed", synth_seed, "RNG seed");
  synth_cmd->add_option("--output", synth_out, "Output directory")->required();

  TrackerFlags ablate_flags;
  std::vector<std::string> ablate_names{"crossing_distinct_shape", "occlusion_lowconf"};
  std::uint64_t ablate_seed = 1;
  int num_seeds = 10;
  bool shape_terms = false;
  std::optional<std::string> ablate_csv;
  auto* ablate = app.add_subcommand("ablate", "Compare feature arms on synthetic scenarios");
  ablate->add_option("--scenario", ablate_names, "Builtin scenario (repeatable)")
      ->capture_default_str();
  ablate->add_option("--seed", ablate_seed, "First seed")->capture_default_str();
  ablate->add_option("--num-seeds", num_seeds, "Number of consecutive seeds")
      ->capture_default_str();
  ablate->add_flag("--shape-terms", shape_terms, "Compare height / area term combinations");
  ablate->add_option("--output", ablate_csv, "Write the table as CSV");
  ablate_flags.attach(ablate);

  std::vector<std::string> argv_store = args;
  if (argv_store.empty()) argv_store.emplace_back("sctracker");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*track) return cmdTrack(det_path, track_out, track_flags, out);
    if (*eval) return cmdEval(gt_path, res_path, report_path, iou_thresh, out);
    if (*synth_cmd) {
      return cmdSynth(scenario_name, scenario_file, synth_seed, seed_opt->count() > 0, synth_out,
                      out);
    }
    if (*ablate) {
      return cmdAblate(ablate_names, ablate_seed, num_seeds, shape_terms, ablate_csv, ablate_flags,
                       out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace sct::cli
