#include "hiertrack/point_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hiertrack/error.hpp"

namespace hiertrack {

std::vector<Point2> TrackBundle::visible_at(std::size_t slot) const {
  std::vector<Point2> out;
  for (const PointTrack& p : points) {
    if (slot < p.visible.size() && p.visible[slot]) out.push_back(p.positions[slot]);
  }
  return out;
}

TrackBundle NullTrackSource::track(int origin_frame, std::span<const Point2>, std::span<const int>) {
  throw Error(Errc::TrackSourceFailure,
              "no track source available for frame " + std::to_string(origin_frame));
}

RecordedTrackSource::RecordedTrackSource(std::vector<TrackBundle> bundles, double match_radius)
    : bundles_(std::move(bundles)), match_radius_(match_radius) {}

TrackCapability RecordedTrackSource::capability() const {
  int max_frames = 0;
  for (const auto& b : bundles_) max_frames = std::max(max_frames, static_cast<int>(b.frames.size()));
  return {max_frames, true};
}

TrackBundle RecordedTrackSource::track(int origin_frame, std::span<const Point2> points,
                                       std::span<const int> frames) {
  auto it = std::find_if(bundles_.begin(), bundles_.end(),
                         [&](const TrackBundle& b) { return b.origin_frame == origin_frame; });
  if (it == bundles_.end()) {
    throw Error(Errc::TrackSourceFailure,
                "no recorded tracks for origin frame " + std::to_string(origin_frame));
  }
  const TrackBundle& rec = *it;
  TrackBundle out;
  out.origin_frame = origin_frame;
  out.frames.assign(frames.begin(), frames.end());
  const double r2 = match_radius_ * match_radius_;
  for (const Point2& q : points) {
    PointTrack pt;
    pt.query = q;
    pt.positions.assign(frames.size(), q);
    pt.visible.assign(frames.size(), false);
    const PointTrack* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const PointTrack& cand : rec.points) {
      const double dx = cand.query.x - q.x;
      const double dy = cand.query.y - q.y;
      const double d = dx * dx + dy * dy;
      if (d <= r2 && d < best_d) {
        best_d = d;
        best = &cand;
      }
    }
    if (best != nullptr) {
      for (std::size_t k = 0; k < frames.size(); ++k) {
        auto slot = std::find(rec.frames.begin(), rec.frames.end(), frames[k]);
        if (slot == rec.frames.end()) continue;
        const auto s = static_cast<std::size_t>(slot - rec.frames.begin());
        if (s < best->positions.size() && s < best->visible.size()) {
          pt.positions[k] = best->positions[s];
          pt.visible[k] = best->visible[s];
        }
      }
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

PointSet farthest_point_sample(const BinaryMask& m, int n) {
  if (m.empty()) throw Error(Errc::EmptyMask, "farthest_point_sample on empty mask");
  if (n < 1) throw Error(Errc::InvalidConfig, "farthest_point_sample needs n >= 1");

  // Pixels arrive in row-major order, so strict comparisons keep the lowest index on ties.
  const std::vector<Pixel> px = m.to_pixels();
  double sx = 0.0, sy = 0.0;
  for (const Pixel& p : px) {
    sx += p.x;
    sy += p.y;
  }
  const double cx = sx / static_cast<double>(px.size());
  const double cy = sy / static_cast<double>(px.size());

  std::size_t seed = 0;
  double seed_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double dx = px[i].x - cx;
    const double dy = px[i].y - cy;
    const double d = dx * dx + dy * dy;
    if (d < seed_d) {
      seed_d = d;
      seed = i;
    }
  }

  const std::size_t count = std::min(px.size(), static_cast<std::size_t>(n));
  PointSet out;
  out.points.reserve(count);
  std::vector<std::int64_t> nearest(px.size(), std::numeric_limits<std::int64_t>::max());
  std::size_t next = seed;
  for (std::size_t k = 0; k < count; ++k) {
    const Pixel chosen = px[next];
    out.points.push_back({static_cast<double>(chosen.x), static_cast<double>(chosen.y)});
    std::int64_t best = -1;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < px.size(); ++i) {
      const std::int64_t dx = px[i].x - chosen.x;
      const std::int64_t dy = px[i].y - chosen.y;
      nearest[i] = std::min(nearest[i], dx * dx + dy * dy);
      if (nearest[i] > best) {
        best = nearest[i];
        best_i = i;
      }
    }
    next = best_i;
  }
  return out;
}

namespace {

double kernel_sum(std::span<const Point2> points, double x, double y, double inv_two_sigma2) {
  double sum = 0.0;
  for (const Point2& p : points) {
    const double dx = x - p.x;
    const double dy = y - p.y;
    sum += std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
  }
  return sum;
}

}  // namespace

SoftMask rbf_reconstruct(std::span<const Point2> points, int width, int height, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::InvalidConfig, "rbf sigma must be positive");
  SoftMask out{width, height, std::vector<double>(static_cast<std::size_t>(width) * height, 0.0)};
  if (points.empty()) return out;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.values[static_cast<std::size_t>(y) * width + x] =
          std::clamp(kernel_sum(points, x, y, inv), 0.0, 1.0);
    }
  }
  return out;
}

BinaryMask rbf_binarize(std::span<const Point2> points, int width, int height, double sigma,
                        double level) {
  if (!(sigma > 0.0)) throw Error(Errc::InvalidConfig, "rbf sigma must be positive");
  if (points.empty() || level > 1.0) return BinaryMask(width, height);
  if (level <= 0.0) return rbf_reconstruct(points, width, height, sigma).binarize(level);

  // Beyond `reach` from every point the sum is below N*exp(-reach^2/2s^2) < level.
  const double n = static_cast<double>(points.size());
  const double reach = sigma * std::sqrt(2.0 * std::log(std::max(n / level, 1.0))) + 1.0;
  double xmin = points[0].x, xmax = points[0].x, ymin = points[0].y, ymax = points[0].y;
  for (const Point2& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(xmin - reach)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(xmax + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(ymin - reach)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(ymax + reach)));

  std::vector<std::uint8_t> dense(static_cast<std::size_t>(width) * height, 0);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double v = std::clamp(kernel_sum(points, x, y, inv), 0.0, 1.0);
      if (v >= level) dense[static_cast<std::size_t>(y) * width + x] = 1;
    }
  }
  return BinaryMask::from_dense(width, height, dense);
}

double rbf_sigma(const BinaryMask& proposal, const FineConfig& cfg) {
  return std::max(cfg.sigma_floor, cfg.sigma_scale * mask_to_bbox(proposal).diagonal());
}

double fine_score(const BinaryMask& proposal, int frame_index, TrackSource& source,
                  std::span<const HistoryFrame> history, const FineConfig& cfg) {
  if (proposal.empty()) throw Error(Errc::EmptyMask, "fine_score on empty proposal");
  const std::size_t k = std::min(history.size(), static_cast<std::size_t>(std::max(cfg.pt_frames, 0)));
  if (k == 0) return 0.0;
  const auto recent = history.subspan(history.size() - k);

  std::vector<int> frames;
  frames.reserve(k);
  for (const HistoryFrame& h : recent) frames.push_back(h.frame_index);

  const PointSet sampled = farthest_point_sample(proposal, cfg.n_points);
  const TrackBundle bundle = source.track(frame_index, sampled.points, frames);
  const double sigma = rbf_sigma(proposal, cfg);

  double total = 0.0;
  int used = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    const std::vector<Point2> vis = bundle.visible_at(slot);
    if (vis.empty()) continue;
    const BinaryMask& stored = recent[slot].mask;
    const BinaryMask recon =
        rbf_binarize(vis, stored.width(), stored.height(), sigma, cfg.rbf_level);
    total += dice(recon, stored);
    ++used;
  }
  return used == 0 ? 0.0 : total / used;
}

}  // namespace hiertrack
