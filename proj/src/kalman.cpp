#include "sctracker/kalman.hpp"

#include <cmath>

namespace sct {

namespace {

// Aspect ratio noise does not scale with height.
constexpr double kAspectPositionStd = 1e-2;
constexpr double kAspectVelocityStd = 1e-5;
constexpr double kAspectMeasurementStd = 1e-1;

const Eigen::Matrix<double, 4, 8>& observation() {
  static const Eigen::Matrix<double, 4, 8> h = [] {
    Eigen::Matrix<double, 4, 8> m = Eigen::Matrix<double, 4, 8>::Zero();
    m.leftCols<4>().setIdentity();
    return m;
  }();
  return h;
}

MeasurementVector toMeasurement(const BoundingBox& box) {
  return {box.x, box.y, box.a, box.h};
}

}  // namespace

KalmanFilter::KalmanFilter(NoiseConfig config) : config_(config) {
  if (!(config_.std_weight_position > 0.0) || !(config_.std_weight_velocity > 0.0)) {
    throw std::invalid_argument("noise weights must be positive");
  }
}

const StateMatrix& KalmanFilter::transition() {
  static const StateMatrix f = [] {
    StateMatrix m = StateMatrix::Identity();
    m.topRightCorner<4, 4>().setIdentity();
    return m;
  }();
  return f;
}

KalmanState KalmanFilter::initiate(const BoundingBox& measurement) const {
  if (!(measurement.h > 0.0) || !measurement.valid()) {
    throw std::invalid_argument("cannot initiate track from invalid box");
  }
  const double h = measurement.h;
  const double pos = 2.0 * config_.std_weight_position * h;
  const double vel = 10.0 * config_.std_weight_velocity * h;

  KalmanState state;
  state.mean << measurement.x, measurement.y, measurement.a, measurement.h, 0, 0, 0, 0;

  StateVector std_dev;
  std_dev << pos, pos, kAspectPositionStd, pos, vel, vel, kAspectVelocityStd, vel;
  state.covariance = std_dev.array().square().matrix().asDiagonal();
  return state;
}

StateMatrix KalmanFilter::processNoise(const KalmanState& state) const {
  const double h = std::abs(state.mean(3));
  const double pos = config_.std_weight_position * h;
  const double vel = config_.std_weight_velocity * h;
  StateVector std_dev;
  std_dev << pos, pos, kAspectPositionStd, pos, vel, vel, kAspectVelocityStd, vel;
  return std_dev.array().square().matrix().asDiagonal();
}

KalmanState KalmanFilter::predict(const KalmanState& state) const {
  const StateMatrix& f = transition();
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + processNoise(state);
  return out;
}

MeasurementMatrix KalmanFilter::measurementNoise(const KalmanState& state) const {
  const double pos = config_.std_weight_position * std::abs(state.mean(3));
  MeasurementVector std_dev(pos, pos, kAspectMeasurementStd, pos);
  return std_dev.array().square().matrix().asDiagonal();
}

MeasurementMatrix KalmanFilter::effectiveMeasurementNoise(const KalmanState& state,
                                                          double score) const {
  MeasurementMatrix r = measurementNoise(state);
  if (config_.use_confidence_noise) r *= (1.0 - score * score);
  return r;
}

KalmanState KalmanFilter::update(const KalmanState& state, const Detection& detection) const {
  const double score = detection.score;
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("detection score must lie in [0, 1]");
  }
  if (!detection.box.valid()) throw std::invalid_argument("invalid detection box");

  const auto& obs = observation();
  const MeasurementMatrix s =
      obs * state.covariance * obs.transpose() + effectiveMeasurementNoise(state, score);
  const Eigen::Matrix<double, 8, 4> pht = state.covariance * obs.transpose();

  // K = P H^T S^-1, solved without forming the inverse.
  const Eigen::LLT<MeasurementMatrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw InvalidStateError("innovation covariance is not positive definite");
  }
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();

  const MeasurementVector innovation = toMeasurement(detection.box) - obs * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = state.covariance - gain * s * gain.transpose();
  out.covariance = (0.5 * (out.covariance + out.covariance.transpose())).eval();

  if (config_.use_velocity_blend) {
    out.mean.tail<4>() = score * out.mean.tail<4>() + (1.0 - score) * state.mean.tail<4>();
  }
  return out;
}

BoundingBox KalmanFilter::project(const KalmanState& state) {
  BoundingBox box{state.mean(0), state.mean(1), state.mean(2), state.mean(3)};
  if (!box.valid()) throw InvalidStateError("projected box has non-positive size");
  return box;
}

}  // namespace sct
