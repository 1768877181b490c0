#include <doctest.h>

#include <random>

#include "hiertrack/error.hpp"
#include "hiertrack/motion_kalman.hpp"
#include "oracles.hpp"

using namespace hiertrack;

namespace {

double max_mean_gap(const KalmanState& s, const oracle::DenseKalman& o) {
  double gap = 0.0;
  for (int i = 0; i < 8; ++i) gap = std::max(gap, std::abs(s.mean(i) - o.x[i]));
  return gap;
}

}  // namespace

TEST_SUITE("motion_kalman") {

TEST_CASE("init sets the box and the priors") {
  KalmanConfig cfg;
  const KalmanState s = kf_init(BBox{10, 20, 4, 6}, cfg);
  CHECK(s.initialized);
  CHECK(s.mean(0) == 10);
  CHECK(s.mean(3) == 6);
  for (int i = 4; i < 8; ++i) CHECK(s.mean(i) == 0);
  for (int i = 0; i < 4; ++i) CHECK(s.covariance(i, i) == cfg.p0_pos * cfg.p0_pos);
  for (int i = 4; i < 8; ++i) CHECK(s.covariance(i, i) == cfg.p0_vel * cfg.p0_vel);
  CHECK(kf_init(BBox{0, 0, 0, 3}, cfg).mean(2) == cfg.min_box_size);
}

TEST_CASE("predict moves the box by its velocity") {
  KalmanState s = kf_init(BBox{0, 0, 2, 2});
  s.mean(4) = 1.0;
  const auto [next, box] = kf_predict(s);
  CHECK(box == BBox{1, 0, 2, 2});
  CHECK(next.covariance.trace() > s.covariance.trace());

  const KalmanState still = kf_init(BBox{5, 6, 3, 4});
  CHECK(kf_predict(still).second == BBox{5, 6, 3, 4});
}

TEST_CASE("uninitialised state is rejected") {
  KalmanState s;
  CHECK_THROWS_AS(kf_predict(s), Error);
  CHECK_THROWS_AS(kf_update(s, BBox{1, 1, 1, 1}), Error);
}

TEST_CASE("update with the predicted box leaves the mean alone") {
  KalmanState s = kf_init(BBox{30, 40, 10, 12});
  s.mean(4) = 2.0;
  s.mean(5) = -1.0;
  const auto [pred, box] = kf_predict(s);
  const KalmanState upd = kf_update(pred, box);
  for (int i = 0; i < 8; ++i) CHECK(upd.mean(i) == doctest::Approx(pred.mean(i)).epsilon(1e-12));
  CHECK(upd.covariance.trace() <= pred.covariance.trace());
}

TEST_CASE("vanishing measurement noise snaps to the measurement") {
  KalmanConfig cfg;
  cfg.r = std::sqrt(1e-9);
  const KalmanState s = kf_predict(kf_init(BBox{0, 0, 5, 5}, cfg), cfg).first;
  const KalmanState u = kf_update(s, BBox{3, -2, 6, 7}, cfg);
  CHECK(std::abs(u.mean(0) - 3) < 1e-6);
  CHECK(std::abs(u.mean(1) + 2) < 1e-6);
  CHECK(std::abs(u.mean(2) - 6) < 1e-6);
}

TEST_CASE("noiseless constant velocity is extrapolated exactly") {
  KalmanConfig cfg;
  cfg.q_pos = 0.0;
  cfg.q_size = 0.0;
  cfg.r = 1e-6;
  const double vx = 2.5, vy = -1.25;
  KalmanState s = kf_init(BBox{10, 50, 8, 8}, cfg);
  double prev_err = 1e300;
  for (int t = 1; t <= 8; ++t) {
    auto [pred, box] = kf_predict(s, cfg);
    const double err = std::hypot(box.cx - (10 + vx * t), box.cy - (50 + vy * t));
    if (t >= 3) {
      CHECK(err < 1e-6);
      CHECK(err <= prev_err + 1e-12);
    }
    prev_err = err;
    s = kf_update(pred, BBox{10 + vx * t, 50 + vy * t, 8, 8}, cfg);
  }
}

TEST_CASE("covariance stays symmetric and positive definite") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  KalmanState s = kf_init(BBox{50, 50, 20, 20});
  for (int t = 0; t < 200; ++t) {
    s = kf_predict(s).first;
    if (t % 3 != 0) s = kf_update(s, BBox{50 + n(rng), 50 + n(rng), 20 + n(rng), 20 + n(rng)});
    CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.covariance.llt().info() == Eigen::Success);
  }
}

TEST_CASE("random sequences match the dense oracle") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int seq = 0; seq < 100; ++seq) {
    KalmanConfig cfg;
    cfg.q_pos = 0.1 + 2.0 * u(rng);
    cfg.q_size = 0.1 + u(rng);
    cfg.r = 0.2 + 3.0 * u(rng);
    oracle::DenseKalman o{cfg.q_pos, cfg.q_size, cfg.r, cfg.p0_pos, cfg.p0_vel, cfg.min_box_size};
    const BBox b0{100 * u(rng), 100 * u(rng), 5 + 30 * u(rng), 5 + 30 * u(rng)};
    KalmanState s = kf_init(b0, cfg);
    o.init(b0.cx, b0.cy, b0.w, b0.h);
    for (int t = 0; t < 30; ++t) {
      s = kf_predict(s, cfg).first;
      o.predict();
      if (u(rng) < 0.7) {
        const BBox z{s.mean(0) + 6 * (u(rng) - 0.5), s.mean(1) + 6 * (u(rng) - 0.5),
                     s.mean(2) + 2 * (u(rng) - 0.5), s.mean(3) + 2 * (u(rng) - 0.5)};
        s = kf_update(s, z, cfg);
        o.update(z.cx, z.cy, z.w, z.h);
      }
      CHECK(max_mean_gap(s, o) < 1e-9);
    }
  }
}

}
