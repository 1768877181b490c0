#include "hiertrack/eval_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hiertrack/error.hpp"

namespace hiertrack::metrics {

namespace {

void require_frames(const SequenceResult& r) {
  if (r.empty()) throw Error(Errc::EmptySequence, "no frames to evaluate");
}

double pred_iou(const FrameResult& f) {
  if (!f.pred_visible || !f.gt_visible) return 0.0;
  return iou_box(f.pred, f.gt);
}

}  // namespace

double frame_overlap(const FrameResult& f) {
  if (!f.gt_visible) return f.pred_visible ? 0.0 : 1.0;
  return pred_iou(f);
}

std::vector<double> success_curve(const SequenceResult& r) {
  require_frames(r);
  std::vector<double> overlaps;
  overlaps.reserve(r.size());
  for (const FrameResult& f : r) overlaps.push_back(frame_overlap(f));
  std::vector<double> curve(101, 0.0);
  for (int i = 0; i <= 100; ++i) {
    const double theta = i / 100.0;
    // The zero threshold admits every frame; all others are strict.
    const auto hits = std::count_if(overlaps.begin(), overlaps.end(),
                                    [&](double o) { return i == 0 ? o >= theta : o > theta; });
    curve[static_cast<std::size_t>(i)] = static_cast<double>(hits) / static_cast<double>(overlaps.size());
  }
  return curve;
}

double success_auc(const SequenceResult& r) {
  const auto curve = success_curve(r);
  double sum = 0.0;
  for (double v : curve) sum += v;
  return 100.0 * sum / static_cast<double>(curve.size());
}

double precision(const SequenceResult& r, double threshold_px) {
  require_frames(r);
  long total = 0, hits = 0;
  for (const FrameResult& f : r) {
    if (!f.gt_visible) continue;
    ++total;
    if (!f.pred_visible) continue;
    if (std::hypot(f.pred.cx - f.gt.cx, f.pred.cy - f.gt.cy) <= threshold_px) ++hits;
  }
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

double norm_precision(const SequenceResult& r) {
  require_frames(r);
  long total = 0, hits = 0;
  for (const FrameResult& f : r) {
    if (!f.gt_visible) continue;
    if (f.gt.w <= 0.0 || f.gt.h <= 0.0) continue;
    ++total;
    if (!f.pred_visible) continue;
    const double dx = (f.pred.cx - f.gt.cx) / f.gt.w;
    const double dy = (f.pred.cy - f.gt.cy) / f.gt.h;
    if (std::hypot(dx, dy) <= 0.2) ++hits;
  }
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

FScore f_score(const SequenceResult& r) {
  require_frames(r);
  std::vector<double> thresholds;
  long gt_visible = 0;
  for (const FrameResult& f : r) {
    if (f.pred_visible) thresholds.push_back(f.confidence);
    if (f.gt_visible) ++gt_visible;
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  FScore best;
  for (double t : thresholds) {
    double pr_sum = 0.0, re_sum = 0.0;
    long predicted = 0;
    for (const FrameResult& f : r) {
      const bool shown = f.pred_visible && f.confidence >= t;
      if (!shown) continue;
      ++predicted;
      const double o = pred_iou(f);
      pr_sum += o;
      if (f.gt_visible) re_sum += o;
    }
    FScore s;
    s.threshold = t;
    s.pr = predicted == 0 ? 0.0 : pr_sum / static_cast<double>(predicted);
    s.re = gt_visible == 0 ? 0.0 : re_sum / static_cast<double>(gt_visible);
    s.f = (s.pr + s.re) > 0.0 ? 2.0 * s.pr * s.re / (s.pr + s.re) : 0.0;
    if (s.f > best.f) best = s;
  }
  return best;
}

}  // namespace hiertrack::metrics
