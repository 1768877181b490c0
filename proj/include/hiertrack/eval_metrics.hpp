#pragma once

#include <span>
#include <vector>

#include "hiertrack/mask_geometry.hpp"

namespace hiertrack::metrics {

struct FrameResult {
  BBox pred;
  bool pred_visible = false;
  double confidence = 0.0;
  BBox gt;
  bool gt_visible = false;
};

using SequenceResult = std::vector<FrameResult>;

/// Per-frame overlap used by the success curve: absence agreement scores 1,
/// a visible prediction on an absent target (or vice versa) scores 0.
double frame_overlap(const FrameResult& f);

/// Area under the success curve sampled at 0, 0.01, ..., 1, in percent. Samples
/// above zero use a strict ">" test; the zero sample counts every frame, so a
/// perfect run scores 100*100/101 and a fully disjoint one 100/101.
/// Throws EmptySequence.
double success_auc(const SequenceResult& r);
std::vector<double> success_curve(const SequenceResult& r);

/// Percent of visible-GT frames whose center error is within `threshold_px`.
double precision(const SequenceResult& r, double threshold_px = 20.0);

/// Percent of visible-GT frames whose size-normalized center error is within
/// 0.2. Frames with a degenerate GT box are skipped.
double norm_precision(const SequenceResult& r);

struct FScore {
  double pr = 0.0;
  double re = 0.0;
  double f = 0.0;
  double threshold = 0.0;
};

/// Long-term precision/recall/F, maximized over every observed confidence.
FScore f_score(const SequenceResult& r);

}  // namespace hiertrack::metrics
