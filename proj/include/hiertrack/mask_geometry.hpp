#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hiertrack {

/// Axis-aligned box in center form. Pixel (x, y) covers [x-0.5, x+0.5] so a
/// single-pixel mask at (3, 4) has box (3, 4, 1, 1).
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x1() const { return cx - w / 2.0; }
  double y1() const { return cy - h / 2.0; }
  double x2() const { return cx + w / 2.0; }
  double y2() const { return cy + h / 2.0; }
  double area() const { return w * h; }
  double diagonal() const;

  static BBox from_corners(double x1, double y1, double x2, double y2);

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// One foreground run over row-major pixel indices.
struct Run {
  std::int64_t start = 0;
  std::int64_t length = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Run-length encoded binary mask. Runs are kept sorted, non-overlapping and
/// maximally merged, so two masks with equal pixel sets compare equal.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  /// Validates runs; throws InvalidMask if they are unsorted, overlapping,
  /// adjacent, empty or out of range.
  static BinaryMask from_runs(int width, int height, std::vector<Run> runs);
  /// `pixels` is row-major, non-zero means foreground.
  static BinaryMask from_dense(int width, int height, std::span<const std::uint8_t> pixels);
  static BinaryMask from_pixels(int width, int height, std::span<const Pixel> pixels);

  std::vector<std::uint8_t> to_dense() const;
  std::vector<Pixel> to_pixels() const;

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<Run>& runs() const { return runs_; }
  std::int64_t area() const { return area_; }
  bool empty() const { return area_ == 0; }
  bool contains(int x, int y) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Run> runs_;
  std::int64_t area_ = 0;
};

/// Row-major grid of values in [0, 1].
struct SoftMask {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  BinaryMask binarize(double level) const;
};

/// Inner 4-connected boundary, sorted row-major.
struct Contour {
  std::vector<Pixel> points;
};

BBox mask_to_bbox(const BinaryMask& m);
double iou_box(const BBox& a, const BBox& b);

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);
double dice(const BinaryMask& a, const BinaryMask& b);
/// Mask IoU; two empty masks agree perfectly and score 1.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b);

Contour contour(const BinaryMask& m);

/// sup over `from_m` of the distance to the nearest point of `to_m`.
double directed_hausdorff(const Contour& from_m, const Contour& to_m);

}  // namespace hiertrack
