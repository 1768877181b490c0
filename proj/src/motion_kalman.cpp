#include "hiertrack/motion_kalman.hpp"

#include <algorithm>

#include "hiertrack/error.hpp"

namespace hiertrack {

namespace {

using MeasMatrix = Eigen::Matrix<double, 4, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

StateMatrix transition() {
  StateMatrix f = StateMatrix::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

MeasMatrix observation() {
  MeasMatrix h = MeasMatrix::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

StateMatrix process_noise(const KalmanConfig& cfg) {
  const double qp = cfg.q_pos * cfg.q_pos;
  const double qs = cfg.q_size * cfg.q_size;
  StateVector d;
  d << qp, qp, qs, qs, qp, qp, qs, qs;
  return d.asDiagonal();
}

void clamp_size(KalmanState& s, const KalmanConfig& cfg) {
  s.mean(2) = std::max(s.mean(2), cfg.min_box_size);
  s.mean(3) = std::max(s.mean(3), cfg.min_box_size);
}

void symmetrize(StateMatrix& p) { p = 0.5 * (p + p.transpose()).eval(); }

void require_initialized(const KalmanState& s) {
  if (!s.initialized) throw Error(Errc::NotInitialized, "Kalman state used before kf_init");
}

}  // namespace

KalmanState kf_init(const BBox& b, const KalmanConfig& cfg) {
  KalmanState s;
  s.mean << b.cx, b.cy, b.w, b.h, 0.0, 0.0, 0.0, 0.0;
  const double pp = cfg.p0_pos * cfg.p0_pos;
  const double pv = cfg.p0_vel * cfg.p0_vel;
  StateVector d;
  d << pp, pp, pp, pp, pv, pv, pv, pv;
  s.covariance = d.asDiagonal();
  s.initialized = true;
  clamp_size(s, cfg);
  return s;
}

std::pair<KalmanState, BBox> kf_predict(const KalmanState& s, const KalmanConfig& cfg) {
  require_initialized(s);
  static const StateMatrix f = transition();
  KalmanState out;
  out.initialized = true;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + process_noise(cfg);
  symmetrize(out.covariance);
  clamp_size(out, cfg);
  return {out, out.box()};
}

KalmanState kf_update(const KalmanState& s, const BBox& measurement, const KalmanConfig& cfg) {
  require_initialized(s);
  static const MeasMatrix h = observation();
  Eigen::Vector4d z(measurement.cx, measurement.cy, measurement.w, measurement.h);
  const Mat4 r = Mat4::Identity() * (cfg.r * cfg.r);

  const Eigen::Vector4d innovation = z - h * s.mean;
  const Mat4 innov_cov = h * s.covariance * h.transpose() + r;
  // K = P H^T S^-1, solved rather than inverted.
  const Eigen::Matrix<double, 8, 4> gain =
      innov_cov.ldlt().solve(h * s.covariance.transpose()).transpose();

  KalmanState out;
  out.initialized = true;
  out.mean = s.mean + gain * innovation;
  // Joseph form keeps the covariance symmetric PSD.
  const StateMatrix i_kh = StateMatrix::Identity() - gain * h;
  out.covariance = i_kh * s.covariance * i_kh.transpose() + gain * r * gain.transpose();
  symmetrize(out.covariance);
  clamp_size(out, cfg);
  return out;
}

}  // namespace hiertrack
