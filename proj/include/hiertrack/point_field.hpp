#pragma once

#include <span>
#include <vector>

#include "hiertrack/mask_geometry.hpp"

namespace hiertrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PointSet {
  std::vector<Point2> points;
  int frame_index = 0;
};

/// One point's backward trajectory; positions and visibility are aligned with
/// TrackBundle::frames.
struct PointTrack {
  Point2 query;
  std::vector<Point2> positions;
  std::vector<bool> visible;

  friend bool operator==(const PointTrack&, const PointTrack&) = default;
};

struct TrackBundle {
  int origin_frame = 0;
  std::vector<int> frames;
  std::vector<PointTrack> points;

  /// Visible positions of every point at `frames[slot]`.
  std::vector<Point2> visible_at(std::size_t slot) const;

  friend bool operator==(const TrackBundle&, const TrackBundle&) = default;
};

struct TrackCapability {
  int max_frames = 0;  // 0 means unbounded
  bool deterministic = true;
};

/// Propagates query points from `origin_frame` back to `frames`. Implementations
/// throw Error(TrackSourceFailure) when they cannot serve a request.
class TrackSource {
 public:
  virtual ~TrackSource() = default;
  virtual TrackCapability capability() const = 0;
  virtual TrackBundle track(int origin_frame, std::span<const Point2> points,
                            std::span<const int> frames) = 0;
};

/// A source with no tracker behind it; every request fails.
class NullTrackSource final : public TrackSource {
 public:
  TrackCapability capability() const override { return {0, true}; }
  TrackBundle track(int origin_frame, std::span<const Point2> points,
                    std::span<const int> frames) override;
};

/// Serves externally computed bundles. A requested point is matched to the
/// nearest stored query point within `match_radius`; unmatched points and
/// frames the bundle does not cover come back invisible.
class RecordedTrackSource final : public TrackSource {
 public:
  explicit RecordedTrackSource(std::vector<TrackBundle> bundles, double match_radius = 0.5);

  TrackCapability capability() const override;
  TrackBundle track(int origin_frame, std::span<const Point2> points,
                    std::span<const int> frames) override;

 private:
  std::vector<TrackBundle> bundles_;
  double match_radius_;
};

struct FineConfig {
  int n_points = 16;
  int pt_frames = 8;
  double rbf_level = 0.5;
  double sigma_scale = 0.1;
  double sigma_floor = 2.0;
};

struct HistoryFrame {
  int frame_index = 0;
  BinaryMask mask;
};

PointSet farthest_point_sample(const BinaryMask& m, int n);

SoftMask rbf_reconstruct(std::span<const Point2> points, int width, int height, double sigma);

/// Same result as rbf_reconstruct(...).binarize(level), evaluated only inside
/// the window where the kernel sum can still reach `level`.
BinaryMask rbf_binarize(std::span<const Point2> points, int width, int height, double sigma,
                        double level);

double rbf_sigma(const BinaryMask& proposal, const FineConfig& cfg);

/// Temporal-consistency score of `proposal` at `frame_index` against the stored
/// selections in `history` (the most recent cfg.pt_frames entries are used).
double fine_score(const BinaryMask& proposal, int frame_index, TrackSource& source,
                  std::span<const HistoryFrame> history, const FineConfig& cfg);

}  // namespace hiertrack
