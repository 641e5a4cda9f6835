#pragma once

#include "sctracker/geometry.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace sct {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;
using MeasurementMatrix = Eigen::Matrix<double, 4, 4>;

/// Mean [x, y, a, h, dx, dy, da, dh] and its covariance.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Identity();
};

struct Detection {
  BoundingBox box;
  double score = 1.0;
};

/// Process / measurement noise scaling. The standard deviations are
/// proportional to the current box height.
struct NoiseConfig {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
  bool use_confidence_noise = true;
  bool use_velocity_blend = true;
};

class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant-velocity Kalman filter over the 8-dimensional box state, with
/// measurement noise shrunk by detection confidence (R * (1 - score^2)) and
/// a confidence-weighted blend of pre- and post-update velocities.
///
/// All operations are const and value-in / value-out.
class KalmanFilter {
 public:
  explicit KalmanFilter(NoiseConfig config = {});

  const NoiseConfig& config() const { return config_; }

  KalmanState initiate(const BoundingBox& measurement) const;
  KalmanState predict(const KalmanState& state) const;
  KalmanState update(const KalmanState& state, const Detection& detection) const;

  /// Box from the first four components of the mean. Throws
  /// InvalidStateError when the box has non-positive height or aspect.
  static BoundingBox project(const KalmanState& state);

  /// Unscaled measurement noise R for a state.
  MeasurementMatrix measurementNoise(const KalmanState& state) const;

  /// R_c actually used by update(): R scaled by (1 - score^2) when
  /// confidence noise is enabled, R otherwise.
  MeasurementMatrix effectiveMeasurementNoise(const KalmanState& state, double score) const;

  StateMatrix processNoise(const KalmanState& state) const;

  static const StateMatrix& transition();

 private:
  NoiseConfig config_;
};

}  // namespace sct
