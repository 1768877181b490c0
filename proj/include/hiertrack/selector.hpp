#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hiertrack/mask_geometry.hpp"
#include "hiertrack/motion_kalman.hpp"
#include "hiertrack/point_field.hpp"

namespace hiertrack {

struct Proposal {
  BinaryMask mask;
  double s_iou = 0.0;
  double objectness = 0.0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct ScoreBreakdown {
  double s_iou = 0.0;
  double s_coarse = 0.0;
  std::optional<double> s_fine;
  double s_conf = 0.0;
  bool fine_used = false;

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

struct FrameDecision {
  int frame_index = 0;
  int chosen = 0;  // -1 on the prompt frame
  std::vector<ScoreBreakdown> breakdowns;
  BBox chosen_bbox;
  bool visible = false;
  bool kf_updated = false;
  bool fine_used = false;
  bool track_failure = false;

  const ScoreBreakdown* chosen_breakdown() const {
    return chosen >= 0 && chosen < static_cast<int>(breakdowns.size()) ? &breakdowns[chosen] : nullptr;
  }

  friend bool operator==(const FrameDecision&, const FrameDecision&) = default;
};

struct SelectorConfig {
  double alpha = 0.25;
  double beta = 0.25;
  double tau = 0.5;
  double visibility_floor = 0.3;
  std::optional<double> kf_update_floor;  // defaults to tau
  bool motion_enabled = true;  // run the Kalman filter at all
  bool fine_enabled = true;
  KalmanConfig kf;
  FineConfig fine;

  double update_floor() const { return kf_update_floor.value_or(tau); }
};

/// s_conf = alpha*s_coarse + (1-alpha)*s_iou. Empty proposals get s_coarse = 0;
/// without a prediction every s_coarse is 0.
std::vector<ScoreBreakdown> score_coarse(std::span<const Proposal> proposals,
                                         const std::optional<BBox>& predicted, double alpha);

/// True iff the best s_conf is strictly below tau.
bool needs_fine(std::span<const ScoreBreakdown> coarse, double tau);

/// s_conf = alpha*s_coarse + beta*s_fine + (1-alpha-beta)*s_iou.
std::vector<ScoreBreakdown> score_fine(std::span<const Proposal> proposals,
                                       const std::optional<BBox>& predicted,
                                       std::span<const double> fine_scores, double alpha, double beta);

/// Highest s_conf, lowest index on ties.
int select_best(std::span<const ScoreBreakdown> breakdowns);

struct StepResult {
  FrameDecision decision;
  KalmanState kf;
};

/// One frame of hierarchical selection: predict, coarse scoring, optional fine
/// escalation, argmax, and a filter update on confident visible selections.
StepResult step(int frame_index, std::span<const Proposal> proposals, const KalmanState& kf,
                TrackSource& tracks, std::span<const HistoryFrame> history, const SelectorConfig& cfg);

}  // namespace hiertrack
