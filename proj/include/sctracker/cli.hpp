#pragma once

#include "sctracker/metrics.hpp"
#include "sctracker/synth.hpp"
#include "sctracker/tracker.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sct::cli {

/// One row of an ablation table: which association / update features are on.
struct AblationArm {
  std::string label;
  bool height_term = false;
  bool area_term = false;
  bool confidence_update = false;

  TrackerConfig apply(TrackerConfig base) const;
};

/// baseline, shape, conf, shape+conf.
std::vector<AblationArm> methodArms();
/// The four height / area term combinations with the confidence update off.
std::vector<AblationArm> shapeTermArms();

struct AblationRow {
  AblationArm arm;
  metrics::MetricsReport pooled;
  std::vector<metrics::MetricsReport> per_run;  // scenario-major, then seed
};

/// Every arm runs on the same generated detections per (scenario, seed).
std::vector<AblationRow> runAblation(const std::vector<synth::ScenarioSpec>& scenarios,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::vector<AblationArm>& arms,
                                     const TrackerConfig& base = {});

std::string formatMethodTable(const std::vector<AblationRow>& rows);
std::string formatShapeTermTable(const std::vector<AblationRow>& rows);

/// Entry point shared by the `sctracker` binary and the tests. Returns the
/// process exit status; all output goes to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sct::cli
