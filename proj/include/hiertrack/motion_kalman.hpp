#pragma once

#include <utility>

#include <Eigen/Dense>

#include "hiertrack/mask_geometry.hpp"

namespace hiertrack {

/// Noise block of the constant-velocity box filter (all values are standard
/// deviations in pixels or pixels/frame).
struct KalmanConfig {
  double q_pos = 1.0;
  double q_size = 0.5;
  double r = 1.0;
  double p0_pos = 2.0;
  double p0_vel = 10.0;
  double min_box_size = 1.0;
};

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;

/// State is [cx, cy, w, h, vcx, vcy, vw, vh].
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Zero();
  bool initialized = false;

  BBox box() const { return BBox{mean(0), mean(1), mean(2), mean(3)}; }
};

KalmanState kf_init(const BBox& b, const KalmanConfig& cfg = {});

/// One-frame constant-velocity prediction. Throws NotInitialized.
std::pair<KalmanState, BBox> kf_predict(const KalmanState& s, const KalmanConfig& cfg = {});

/// Corrects with an observed box. Throws NotInitialized.
KalmanState kf_update(const KalmanState& s, const BBox& measurement, const KalmanConfig& cfg = {});

inline double coarse_score(const BBox& predicted, const BBox& proposal_box) {
  return iou_box(predicted, proposal_box);
}

}  // namespace hiertrack
