#include "sctracker/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace sct {

std::string toString(TrackStatus status) {
  switch (status) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Confirmed: return "confirmed";
    case TrackStatus::Lost: return "lost";
    case TrackStatus::Removed: return "removed";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(low_thresh) || !in_unit(high_thresh) || !(low_thresh < high_thresh)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= low_thresh < high_thresh <= 1");
  }
  if (!in_unit(new_track_thresh)) {
    throw std::invalid_argument("new_track_thresh must lie in [0, 1]");
  }
  if (!(match_gate_stage1 >= 0.0) || !(match_gate_stage2 >= 0.0) ||
      !(match_gate_unconfirmed >= 0.0)) {
    throw std::invalid_argument("match gates must be non-negative");
  }
  if (max_lost_frames < 1) throw std::invalid_argument("max_lost_frames must be >= 1");
  if (!(shape_params.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(noise_config.std_weight_position > 0.0) || !(noise_config.std_weight_velocity > 0.0)) {
    throw std::invalid_argument("noise weights must be positive");
  }
}

namespace {

struct StageOutcome {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track slot, detection slot)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

BoundingBox meanBox(const KalmanState& state) {
  return {state.mean(0), state.mean(1), state.mean(2), state.mean(3)};
}

StageOutcome associate(const std::vector<std::size_t>& track_slots,
                       const std::vector<BoundingBox>& predicted,
                       const std::vector<Detection>& detections,
                       const std::vector<std::size_t>& det_slots, const ShapeIoUParams& params,
                       double gate) {
  std::vector<BoundingBox> track_boxes;
  track_boxes.reserve(track_slots.size());
  for (const auto slot : track_slots) track_boxes.push_back(predicted[slot]);
  std::vector<BoundingBox> det_boxes;
  det_boxes.reserve(det_slots.size());
  for (const auto slot : det_slots) det_boxes.push_back(detections[slot].box);

  const AssignmentResult solved = solveAssignment(costMatrix(track_boxes, det_boxes, params), gate);

  StageOutcome out;
  for (const auto& [r, c] : solved.matches) out.matches.emplace_back(track_slots[r], det_slots[c]);
  for (const int r : solved.unmatched_rows) out.unmatched_tracks.push_back(track_slots[r]);
  for (const int c : solved.unmatched_cols) out.unmatched_detections.push_back(det_slots[c]);
  return out;
}

void validateDetection(const Detection& det) {
  if (!det.box.valid()) throw TrackerError("malformed detection box");
  if (!(det.score >= 0.0 && det.score <= 1.0)) {
    throw TrackerError("detection score must lie in [0, 1]");
  }
}

}  // namespace

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)), filter_(config_.noise_config) {
  config_.validate();
}

std::optional<Track> Tracker::findTrack(std::int64_t id) const {
  for (const auto& t : tracks_) {
    if (t.id == id) return t;
  }
  return std::nullopt;
}

void Tracker::spawn(const Detection& det, std::int64_t frame_index) {
  Track track;
  track.id = next_id_++;
  track.state = filter_.initiate(det.box);
  track.status = TrackStatus::Tentative;
  track.last_score = det.score;
  track.start_frame = frame_index;
  track.last_update_frame = frame_index;
  tracks_.push_back(std::move(track));
}

FrameResult Tracker::step(std::int64_t frame_index, const std::vector<Detection>& detections) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw TrackerError("frame index " + std::to_string(frame_index) +
                       " does not follow previous frame " + std::to_string(*last_frame_));
  }
  for (const auto& det : detections) validateDetection(det);
  const bool first_frame = !last_frame_.has_value();
  last_frame_ = frame_index;

  std::vector<std::size_t> high, low;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double s = detections[i].score;
    if (s >= config_.high_thresh) {
      high.push_back(i);
    } else if (s >= config_.low_thresh) {
      low.push_back(i);
    }
  }

  // Predict; tracks whose prediction degenerates can no longer be associated.
  std::vector<Track> survivors;
  survivors.reserve(tracks_.size());
  for (auto& track : tracks_) {
    track.state = filter_.predict(track.state);
    if (meanBox(track.state).valid()) {
      survivors.push_back(std::move(track));
    } else {
      removed_ids_.push_back(track.id);
    }
  }
  tracks_ = std::move(survivors);

  std::vector<BoundingBox> predicted;
  predicted.reserve(tracks_.size());
  for (const auto& track : tracks_) {
    predicted.push_back(meanBox(track.state));
  }

  std::vector<std::size_t> pool, tentative;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].status == TrackStatus::Tentative && config_.use_unconfirmed_stage) {
      tentative.push_back(i);
    } else {
      pool.push_back(i);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> matches;

  const StageOutcome first = associate(pool, predicted, detections, high,
                                       config_.shape_params, config_.match_gate_stage1);
  matches.insert(matches.end(), first.matches.begin(), first.matches.end());

  const StageOutcome second = associate(first.unmatched_tracks, predicted, detections, low,
                                        config_.shape_params, config_.match_gate_stage2);
  matches.insert(matches.end(), second.matches.begin(), second.matches.end());

  StageOutcome third;
  third.unmatched_detections = first.unmatched_detections;
  if (!tentative.empty()) {
    third = associate(tentative, predicted, detections, first.unmatched_detections,
                      config_.shape_params, config_.match_gate_unconfirmed);
    matches.insert(matches.end(), third.matches.begin(), third.matches.end());
  }

  FrameResult result;
  result.frame_index = frame_index;

  std::vector<char> matched(tracks_.size(), 0);
  for (const auto& [slot, det_slot] : matches) {
    Track& track = tracks_[slot];
    const Detection& det = detections[det_slot];
    track.state = filter_.update(track.state, det);
    track.status = TrackStatus::Confirmed;
    track.frames_since_update = 0;
    track.last_score = det.score;
    track.last_update_frame = frame_index;
    matched[slot] = 1;
  }

  std::vector<Track> kept;
  kept.reserve(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& track = tracks_[i];
    if (matched[i]) {
      const BoundingBox box = meanBox(track.state);
      if (!box.valid()) {
        removed_ids_.push_back(track.id);
        continue;
      }
      result.outputs.push_back({track.id, box, track.last_score});
      kept.push_back(std::move(track));
      continue;
    }
    if (track.status == TrackStatus::Tentative) {
      removed_ids_.push_back(track.id);
      continue;
    }
    track.status = TrackStatus::Lost;
    ++track.frames_since_update;
    if (track.frames_since_update > config_.max_lost_frames) {
      removed_ids_.push_back(track.id);
      continue;
    }
    kept.push_back(std::move(track));
  }
  tracks_ = std::move(kept);

  for (const auto det_slot : third.unmatched_detections) {
    const Detection& det = detections[det_slot];
    if (det.score < config_.new_track_thresh) continue;
    spawn(det, frame_index);
    if (first_frame && config_.confirm_first_frame) {
      Track& born = tracks_.back();
      born.status = TrackStatus::Confirmed;
      result.outputs.push_back({born.id, det.box, det.score});
    }
  }

  std::sort(result.outputs.begin(), result.outputs.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
  return result;
}

std::vector<FrameResult> runSequence(const DetectionsByFrame& detections,
                                     const TrackerConfig& config,
                                     std::vector<double>* step_millis) {
  std::vector<FrameResult> results;
  if (detections.empty()) return results;

  Tracker tracker(config);
  const std::int64_t first = detections.begin()->first;
  const std::int64_t last = detections.rbegin()->first;
  static const std::vector<Detection> kNone;
  for (std::int64_t frame = first; frame <= last; ++frame) {
    const auto it = detections.find(frame);
    try {
      const auto start = std::chrono::steady_clock::now();
      results.push_back(tracker.step(frame, it == detections.end() ? kNone : it->second));
      if (step_millis) {
        const std::chrono::duration<double, std::milli> took =
            std::chrono::steady_clock::now() - start;
        step_millis->push_back(took.count());
      }
    } catch (const std::exception& e) {
      throw TrackerError("frame " + std::to_string(frame) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace sct
