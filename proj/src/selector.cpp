#include "hiertrack/selector.hpp"

#include <algorithm>

#include "hiertrack/error.hpp"

namespace hiertrack {

namespace {

double coarse_for(const Proposal& p, const std::optional<BBox>& predicted) {
  if (!predicted || p.mask.empty()) return 0.0;
  return coarse_score(*predicted, mask_to_bbox(p.mask));
}

void require_proposals(std::span<const Proposal> proposals) {
  if (proposals.empty()) throw Error(Errc::NoProposals, "no proposals for this frame");
}

}  // namespace

std::vector<ScoreBreakdown> score_coarse(std::span<const Proposal> proposals,
                                         const std::optional<BBox>& predicted, double alpha) {
  require_proposals(proposals);
  if (alpha < 0.0 || alpha > 1.0) throw Error(Errc::WeightViolation, "alpha outside [0, 1]");
  std::vector<ScoreBreakdown> out;
  out.reserve(proposals.size());
  for (const Proposal& p : proposals) {
    ScoreBreakdown b;
    b.s_iou = p.s_iou;
    b.s_coarse = coarse_for(p, predicted);
    b.s_conf = std::clamp(alpha * b.s_coarse + (1.0 - alpha) * b.s_iou, 0.0, 1.0);
    out.push_back(b);
  }
  return out;
}

bool needs_fine(std::span<const ScoreBreakdown> coarse, double tau) {
  if (coarse.empty()) return false;
  const auto best = std::max_element(
      coarse.begin(), coarse.end(),
      [](const ScoreBreakdown& a, const ScoreBreakdown& b) { return a.s_conf < b.s_conf; });
  return best->s_conf < tau;
}

std::vector<ScoreBreakdown> score_fine(std::span<const Proposal> proposals,
                                       const std::optional<BBox>& predicted,
                                       std::span<const double> fine_scores, double alpha, double beta) {
  require_proposals(proposals);
  if (alpha < 0.0 || beta < 0.0 || alpha + beta > 1.0) {
    throw Error(Errc::WeightViolation, "need alpha, beta >= 0 and alpha + beta <= 1");
  }
  if (fine_scores.size() != proposals.size()) {
    throw Error(Errc::DimensionMismatch, "fine scores not aligned with proposals");
  }
  std::vector<ScoreBreakdown> out;
  out.reserve(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    ScoreBreakdown b;
    b.s_iou = proposals[i].s_iou;
    b.s_coarse = coarse_for(proposals[i], predicted);
    b.s_fine = fine_scores[i];
    b.fine_used = true;
    // Evaluation order matches score_coarse so beta = 0 reproduces it exactly.
    b.s_conf = std::clamp(alpha * b.s_coarse + beta * fine_scores[i] + (1.0 - alpha - beta) * b.s_iou,
                          0.0, 1.0);
    out.push_back(b);
  }
  return out;
}

int select_best(std::span<const ScoreBreakdown> breakdowns) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(breakdowns.size()); ++i) {
    if (breakdowns[i].s_conf > breakdowns[best].s_conf) best = i;
  }
  return best;
}

StepResult step(int frame_index, std::span<const Proposal> proposals, const KalmanState& kf,
                TrackSource& tracks, std::span<const HistoryFrame> history, const SelectorConfig& cfg) {
  require_proposals(proposals);
  StepResult result;
  result.kf = kf;
  FrameDecision& d = result.decision;
  d.frame_index = frame_index;

  std::optional<BBox> predicted;
  if (cfg.motion_enabled) {
    auto [next, box] = kf_predict(kf, cfg.kf);
    result.kf = next;
    predicted = box;
  }

  d.breakdowns = score_coarse(proposals, predicted, cfg.alpha);

  if (cfg.fine_enabled && needs_fine(d.breakdowns, cfg.tau)) {
    try {
      std::vector<double> fine(proposals.size(), 0.0);
      for (std::size_t i = 0; i < proposals.size(); ++i) {
        if (!proposals[i].mask.empty()) {
          fine[i] = fine_score(proposals[i].mask, frame_index, tracks, history, cfg.fine);
        }
      }
      d.breakdowns = score_fine(proposals, predicted, fine, cfg.alpha, cfg.beta);
      d.fine_used = true;
    } catch (const Error& e) {
      if (e.code() != Errc::TrackSourceFailure) throw;
      d.track_failure = true;
    }
  }

  d.chosen = select_best(d.breakdowns);
  const ScoreBreakdown& best = d.breakdowns[static_cast<std::size_t>(d.chosen)];
  const BinaryMask& mask = proposals[static_cast<std::size_t>(d.chosen)].mask;
  d.visible = !mask.empty() && best.s_conf >= cfg.visibility_floor;
  if (!mask.empty()) d.chosen_bbox = mask_to_bbox(mask);

  if (cfg.motion_enabled && d.visible && best.s_conf >= cfg.update_floor()) {
    result.kf = kf_update(result.kf, d.chosen_bbox, cfg.kf);
    d.kf_updated = true;
  }
  return result;
}

}  // namespace hiertrack
