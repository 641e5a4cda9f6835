#pragma once

#include "sctracker/assignment.hpp"
#include "sctracker/geometry.hpp"
#include "sctracker/kalman.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sct {

enum class TrackStatus { Tentative, Confirmed, Lost, Removed };

std::string toString(TrackStatus status);

struct Track {
  std::int64_t id = 0;
  KalmanState state;
  TrackStatus status = TrackStatus::Tentative;
  int frames_since_update = 0;
  double last_score = 0.0;
  std::int64_t start_frame = 0;
  std::int64_t last_update_frame = 0;
};

struct TrackerConfig {
  double high_thresh = 0.6;
  double low_thresh = 0.1;
  double new_track_thresh = 0.7;
  double match_gate_stage1 = 0.9;
  double match_gate_stage2 = 0.5;
  double match_gate_unconfirmed = 0.7;
  int max_lost_frames = 30;
  // Tracks born on the tracker's first frame start Confirmed.
  bool confirm_first_frame = true;
  // Third matching pass between Tentative tracks and leftover high detections.
  bool use_unconfirmed_stage = true;
  ShapeIoUParams shape_params;
  NoiseConfig noise_config;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct TrackOutput {
  std::int64_t id = 0;
  BoundingBox box;
  double score = 0.0;
};

struct FrameResult {
  std::int64_t frame_index = 0;
  std::vector<TrackOutput> outputs;
};

class TrackerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-stage (high / low confidence) tracking-by-detection with shape-IoU
/// costs and confidence-aware Kalman updates.
///
/// Not thread-safe; one instance per sequence.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  FrameResult step(std::int64_t frame_index, const std::vector<Detection>& detections);

  const TrackerConfig& config() const { return config_; }

  /// Tentative, Confirmed and Lost tracks.
  const std::vector<Track>& activeTracks() const { return tracks_; }
  std::optional<Track> findTrack(std::int64_t id) const;
  const std::vector<std::int64_t>& removedIds() const { return removed_ids_; }

 private:
  void spawn(const Detection& det, std::int64_t frame_index);

  TrackerConfig config_;
  KalmanFilter filter_;
  std::vector<Track> tracks_;
  std::vector<std::int64_t> removed_ids_;
  std::int64_t next_id_ = 1;
  std::optional<std::int64_t> last_frame_;
};

using DetectionsByFrame = std::map<std::int64_t, std::vector<Detection>>;

/// Runs a fresh tracker over every frame from the first to the last key,
/// feeding empty detection lists for frames missing from the map. When
/// `step_millis` is given it receives the wall time of each step.
std::vector<FrameResult> runSequence(const DetectionsByFrame& detections,
                                     const TrackerConfig& config = {},
                                     std::vector<double>* step_millis = nullptr);

}  // namespace sct
