#pragma once

#include "sctracker/geometry.hpp"
#include "sctracker/tracker.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sct::motio {

/// One line of a MOTChallenge file:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
struct MotRecord {
  std::int64_t frame = 1;
  std::int64_t id = -1;
  double bb_left = 0.0;
  double bb_top = 0.0;
  double bb_width = 0.0;
  double bb_height = 0.0;
  double conf = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  bool operator==(const MotRecord&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses one non-empty line. Accepts 6 to 10 comma-separated fields
/// (missing trailing fields default to conf 1 and -1 placeholders).
/// Whitespace around fields is ignored. Throws ParseError with `line_no`.
MotRecord parseRecord(std::string_view line, std::size_t line_no, const std::string& source = "");

/// Parses a whole buffer; blank lines are skipped.
std::vector<MotRecord> parseRecords(std::string_view text, const std::string& source = "");

std::string formatRecord(const MotRecord& record);
std::string formatRecords(const std::vector<MotRecord>& records);

std::vector<MotRecord> readRecords(const std::filesystem::path& path);
void writeRecords(const std::filesystem::path& path, const std::vector<MotRecord>& records);

struct DetectionFile {
  DetectionsByFrame frames;
  std::size_t clamped_scores = 0;  // conf outside [0, 1], clamped
  std::size_t rejected_rows = 0;   // non-positive width / height
};

DetectionFile detectionsFromRecords(const std::vector<MotRecord>& records);
DetectionFile readDetections(const std::filesystem::path& path);
std::vector<MotRecord> detectionsToRecords(const DetectionsByFrame& detections);
void writeDetections(const std::filesystem::path& path, const DetectionsByFrame& detections);

struct GroundTruthObject {
  std::int64_t id = 0;
  BoundingBox box;
  bool evaluable = true;
};

using GroundTruthByFrame = std::map<std::int64_t, std::vector<GroundTruthObject>>;

struct GroundTruthFile {
  GroundTruthByFrame frames;
  std::size_t rejected_rows = 0;
};

/// Ground truth rows need id >= 1 and unique (frame, id). A row is
/// non-evaluable when its conf field is 0 or its class field (x) is set to
/// something other than -1 or 1.
GroundTruthFile groundTruthFromRecords(const std::vector<MotRecord>& records,
                                       const std::string& source = "");
GroundTruthFile readGroundTruth(const std::filesystem::path& path);
std::vector<MotRecord> groundTruthToRecords(const GroundTruthByFrame& gt);
void writeGroundTruth(const std::filesystem::path& path, const GroundTruthByFrame& gt);

std::vector<MotRecord> resultsToRecords(const std::vector<FrameResult>& results);
void writeResults(const std::filesystem::path& path, const std::vector<FrameResult>& results);

/// Reads a result file into the same per-frame shape produced by the
/// tracker. Rows need id >= 1.
std::vector<FrameResult> readResults(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Configuration files: `key = value` lines, `#` comments. Keys:
//   high_thresh low_thresh new_track_thresh match_gate_stage1
//   match_gate_stage2 match_gate_unconfirmed max_lost_frames
//   confirm_first_frame use_unconfirmed_stage epsilon use_height_term
//   use_area_term std_weight_position std_weight_velocity
//   use_confidence_noise use_velocity_blend
// Booleans accept true/false/1/0/on/off.

/// Environment variable naming a default config file for the CLI.
inline constexpr const char* kConfigEnvVar = "SCTRACKER_CONFIG";

void applyConfigEntry(TrackerConfig& config, std::string_view key, std::string_view value);
TrackerConfig parseConfig(std::string_view text, TrackerConfig base = {},
                          const std::string& source = "");
TrackerConfig loadConfig(const std::filesystem::path& path, TrackerConfig base = {});
std::string formatConfig(const TrackerConfig& config);

}  // namespace sct::motio
