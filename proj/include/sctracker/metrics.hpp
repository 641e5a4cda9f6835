#pragma once

#include "sctracker/motio.hpp"
#include "sctracker/tracker.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sct::metrics {

using HypothesesByFrame = std::map<std::int64_t, std::vector<TrackOutput>>;

HypothesesByFrame fromResults(const std::vector<FrameResult>& results);

/// CLEAR-MOT counts plus identity (IDF1) scores. MOTA and IDF1 are
/// fractions (1.0 == 100%).
struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  std::int64_t idsw = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t gt_count = 0;
  std::int64_t matches = 0;  // CLEAR true positives summed over frames
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
  std::int64_t frames = 0;

  bool operator==(const MetricsReport&) const = default;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-evaluable ground truth objects are dropped before scoring. Throws
/// MetricsError when no evaluable ground truth remains.
MetricsReport evaluate(const motio::GroundTruthByFrame& gt, const HypothesesByFrame& hypotheses,
                       double iou_match_thresh = 0.5);

/// Pools counts over several sequences and recomputes MOTA / IDF1 from the
/// pooled counts.
MetricsReport combine(const std::vector<MetricsReport>& reports);

/// `key: value` lines, MOTA / IDF1 shown as percentages.
std::string formatReport(const MetricsReport& report);

/// Header line for the single-row CSV form.
std::string csvHeader();
/// One CSV row, fields in csvHeader() order. MOTA and IDF1 as fractions with
/// 17 significant digits.
std::string formatCsvRow(const MetricsReport& report);
/// Parses header + row as written by csvHeader()/formatCsvRow().
MetricsReport parseCsv(std::string_view text);

}  // namespace sct::metrics
