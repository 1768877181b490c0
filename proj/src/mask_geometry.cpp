#include "hiertrack/mask_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hiertrack/error.hpp"

namespace hiertrack {

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(Errc::DimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

}  // namespace

double BBox::diagonal() const { return std::hypot(w, h); }

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  return BBox{(x1 + x2) / 2.0, (y1 + y2) / 2.0, std::max(0.0, x2 - x1), std::max(0.0, y2 - y1)};
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidMask, "mask dimensions must be positive");
  }
}

BinaryMask BinaryMask::from_runs(int width, int height, std::vector<Run> runs) {
  BinaryMask m(width, height);
  const std::int64_t total = static_cast<std::int64_t>(width) * height;
  std::int64_t prev_end = -1;
  for (const Run& r : runs) {
    if (r.length <= 0 || r.start < 0 || r.start + r.length > total) {
      throw Error(Errc::InvalidMask, "run out of range");
    }
    // Adjacent runs must have been merged, so a gap of at least one pixel.
    if (r.start <= prev_end) {
      throw Error(Errc::InvalidMask, "runs unsorted, overlapping or adjacent");
    }
    prev_end = r.start + r.length;
    m.area_ += r.length;
  }
  m.runs_ = std::move(runs);
  return m;
}

BinaryMask BinaryMask::from_dense(int width, int height, std::span<const std::uint8_t> pixels) {
  BinaryMask m(width, height);
  const std::int64_t total = static_cast<std::int64_t>(width) * height;
  if (static_cast<std::int64_t>(pixels.size()) != total) {
    throw Error(Errc::DimensionMismatch, "dense buffer size does not match mask dimensions");
  }
  std::int64_t i = 0;
  while (i < total) {
    if (pixels[static_cast<std::size_t>(i)] == 0) {
      ++i;
      continue;
    }
    const std::int64_t start = i;
    while (i < total && pixels[static_cast<std::size_t>(i)] != 0) ++i;
    m.runs_.push_back({start, i - start});
    m.area_ += i - start;
  }
  return m;
}

BinaryMask BinaryMask::from_pixels(int width, int height, std::span<const Pixel> pixels) {
  std::vector<std::uint8_t> dense(static_cast<std::size_t>(width) * height, 0);
  for (const Pixel& p : pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) continue;
    dense[static_cast<std::size_t>(p.y) * width + p.x] = 1;
  }
  return from_dense(width, height, dense);
}

std::vector<std::uint8_t> BinaryMask::to_dense() const {
  std::vector<std::uint8_t> dense(static_cast<std::size_t>(width_) * height_, 0);
  for (const Run& r : runs_) {
    std::fill_n(dense.begin() + r.start, r.length, std::uint8_t{1});
  }
  return dense;
}

std::vector<Pixel> BinaryMask::to_pixels() const {
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(area_));
  for (const Run& r : runs_) {
    for (std::int64_t i = r.start; i < r.start + r.length; ++i) {
      out.push_back({static_cast<int>(i % width_), static_cast<int>(i / width_)});
    }
  }
  return out;
}

bool BinaryMask::contains(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  const std::int64_t idx = static_cast<std::int64_t>(y) * width_ + x;
  auto it = std::upper_bound(runs_.begin(), runs_.end(), idx,
                             [](std::int64_t v, const Run& r) { return v < r.start; });
  if (it == runs_.begin()) return false;
  --it;
  return idx < it->start + it->length;
}

BinaryMask SoftMask::binarize(double level) const {
  std::vector<std::uint8_t> dense(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) dense[i] = values[i] >= level ? 1 : 0;
  return BinaryMask::from_dense(width, height, dense);
}

BBox mask_to_bbox(const BinaryMask& m) {
  if (m.empty()) throw Error(Errc::EmptyMask, "mask_to_bbox on empty mask");
  const std::int64_t w = m.width();
  std::int64_t xmin = w, xmax = -1;
  const std::int64_t ymin = m.runs().front().start / w;
  const std::int64_t ymax = (m.runs().back().start + m.runs().back().length - 1) / w;
  for (const Run& r : m.runs()) {
    const std::int64_t first = r.start;
    const std::int64_t last = r.start + r.length - 1;
    if (first / w != last / w) {
      // A run crossing a row boundary touches both column 0 and column w-1.
      xmin = 0;
      xmax = w - 1;
    } else {
      xmin = std::min(xmin, first % w);
      xmax = std::max(xmax, last % w);
    }
  }
  return BBox{(static_cast<double>(xmin) + static_cast<double>(xmax)) / 2.0,
              (static_cast<double>(ymin) + static_cast<double>(ymax)) / 2.0,
              static_cast<double>(xmax - xmin + 1), static_cast<double>(ymax - ymin + 1)};
}

double iou_box(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b);
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t i = 0, j = 0;
  std::int64_t total = 0;
  while (i < ra.size() && j < rb.size()) {
    const std::int64_t a_end = ra[i].start + ra[i].length;
    const std::int64_t b_end = rb[j].start + rb[j].length;
    const std::int64_t lo = std::max(ra[i].start, rb[j].start);
    const std::int64_t hi = std::min(a_end, b_end);
    if (hi > lo) total += hi - lo;
    if (a_end < b_end) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

double dice(const BinaryMask& a, const BinaryMask& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t denom = a.area() + b.area();
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(denom);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Boolean combination of two sorted run lists by sweeping the run boundaries.
template <typename Keep>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, Keep keep) {
  require_same_dims(a, b);
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::vector<std::int64_t> cuts;
  cuts.reserve(2 * (ra.size() + rb.size()));
  for (const Run& r : ra) {
    cuts.push_back(r.start);
    cuts.push_back(r.start + r.length);
  }
  for (const Run& r : rb) {
    cuts.push_back(r.start);
    cuts.push_back(r.start + r.length);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Run> out;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const std::int64_t lo = cuts[k];
    const std::int64_t hi = cuts[k + 1];
    while (ia < ra.size() && ra[ia].start + ra[ia].length <= lo) ++ia;
    while (ib < rb.size() && rb[ib].start + rb[ib].length <= lo) ++ib;
    const bool in_a = ia < ra.size() && ra[ia].start <= lo;
    const bool in_b = ib < rb.size() && rb[ib].start <= lo;
    if (!keep(in_a, in_b)) continue;
    if (!out.empty() && out.back().start + out.back().length == lo) {
      out.back().length += hi - lo;
    } else {
      out.push_back({lo, hi - lo});
    }
  }
  return BinaryMask::from_runs(a.width(), a.height(), std::move(out));
}

}  // namespace

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}

BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; });
}

Contour contour(const BinaryMask& m) {
  if (m.empty()) throw Error(Errc::EmptyMask, "contour of empty mask");
  const int w = m.width();
  const int h = m.height();
  const auto dense = m.to_dense();
  auto fg = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && dense[static_cast<std::size_t>(y) * w + x] != 0;
  };
  Contour c;
  for (const Run& r : m.runs()) {
    for (std::int64_t i = r.start; i < r.start + r.length; ++i) {
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      if (!fg(x - 1, y) || !fg(x + 1, y) || !fg(x, y - 1) || !fg(x, y + 1)) {
        c.points.push_back({x, y});
      }
    }
  }
  return c;
}

double directed_hausdorff(const Contour& from_m, const Contour& to_m) {
  if (from_m.points.empty() || to_m.points.empty()) {
    throw Error(Errc::EmptyContour, "directed_hausdorff needs two non-empty contours");
  }
  // Early-break scan: once a target point is closer than the running max, the
  // current source point cannot raise the max. Exact on integer coordinates.
  std::int64_t cmax = 0;
  for (const Pixel& p : from_m.points) {
    std::int64_t cmin = std::numeric_limits<std::int64_t>::max();
    for (const Pixel& q : to_m.points) {
      const std::int64_t dx = p.x - q.x;
      const std::int64_t dy = p.y - q.y;
      const std::int64_t d = dx * dx + dy * dy;
      if (d < cmin) {
        cmin = d;
        if (cmin <= cmax) break;
      }
    }
    cmax = std::max(cmax, cmin);
  }
  return std::sqrt(static_cast<double>(cmax));
}

}  // namespace hiertrack
