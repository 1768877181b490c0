#include "hiertrack/memory_bank.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace hiertrack {

MemoryBank make_bank(const BinaryMask& prompt_mask, int prompt_frame) {
  MemoryBank bank;
  bank.prompt.frame_index = prompt_frame;
  bank.prompt.mask = prompt_mask;
  bank.prompt.s_conf = 1.0;
  bank.prompt.s_iou = 1.0;
  return bank;
}

bool is_high_confidence(const FrameDecision& decision, const MemoryConfig& cfg) {
  const ScoreBreakdown* b = decision.chosen_breakdown();
  if (b == nullptr || !decision.visible) return false;
  return b->s_iou >= cfg.theta_iou && b->s_coarse >= cfg.theta_motion;
}

std::pair<bool, double> is_distinctive(const BinaryMask& chosen_mask,
                                       std::span<const BinaryMask> alternative_masks,
                                       double image_diag, double theta_dist) {
  if (chosen_mask.empty()) return {false, 0.0};
  const Contour target = contour(chosen_mask);
  bool any = false;
  double sep = 0.0;
  for (const BinaryMask& alt : alternative_masks) {
    if (alt.empty()) continue;
    any = true;
    sep = std::max(sep, directed_hausdorff(contour(alt), target));
  }
  if (!any) return {false, 0.0};
  sep /= image_diag;
  return {sep >= theta_dist, sep};
}

MemoryBank admit(MemoryBank bank, const FrameDecision& decision, std::span<const Proposal> proposals,
                 const MemoryConfig& cfg) {
  const ScoreBreakdown* chosen = decision.chosen_breakdown();
  if (chosen == nullptr || static_cast<std::size_t>(decision.chosen) >= proposals.size()) return bank;
  if (decision.frame_index <= bank.prompt.frame_index) return bank;

  MemoryEntry entry;
  entry.frame_index = decision.frame_index;
  entry.mask = proposals[static_cast<std::size_t>(decision.chosen)].mask;
  entry.s_conf = chosen->s_conf;
  entry.s_iou = chosen->s_iou;

  if (!cfg.short_filtered) {
    bank.short_term.clear();
    bank.short_term.push_back(entry);
  }

  if (!is_high_confidence(decision, cfg)) return bank;

  if (cfg.long_enabled) {
    std::vector<BinaryMask> alternatives;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (static_cast<int>(i) != decision.chosen) alternatives.push_back(proposals[i].mask);
    }
    const BinaryMask& m = entry.mask;
    const double diag = std::hypot(static_cast<double>(m.width()), static_cast<double>(m.height()));
    std::tie(entry.distinctive, entry.separation) = is_distinctive(m, alternatives, diag, cfg.theta_dist);
  }

  if (cfg.short_filtered) {
    ++bank.qualifying_frames;
    const bool newer = bank.short_term.empty() || bank.short_term.back().frame_index < entry.frame_index;
    if ((bank.qualifying_frames - 1) % cfg.k_sm == 0 && newer) {
      bank.short_term.push_back(entry);
      while (static_cast<int>(bank.short_term.size()) > cfg.n_sm) bank.short_term.pop_front();
    }
  }

  if (cfg.long_enabled && entry.distinctive) {
    ++bank.distinctive_frames;
    const bool newer = bank.long_term.empty() || bank.long_term.back().frame_index < entry.frame_index;
    if ((bank.distinctive_frames - 1) % cfg.k_lm == 0 && newer) {
      bank.long_term.push_back(entry);
      if (static_cast<int>(bank.long_term.size()) > cfg.n_lm) {
        // Least distinctive goes first; the oldest loses a tie.
        auto victim = std::min_element(
            bank.long_term.begin(), bank.long_term.end(),
            [](const MemoryEntry& a, const MemoryEntry& b) { return a.separation < b.separation; });
        bank.long_term.erase(victim);
      }
    }
  }
  return bank;
}

std::vector<MemoryEntry> conditioning_set(const MemoryBank& bank) {
  std::vector<MemoryEntry> out;
  out.reserve(1 + bank.long_term.size() + bank.short_term.size());
  out.push_back(bank.prompt);
  auto seen = [&](int frame) {
    return std::any_of(out.begin(), out.end(), [&](const MemoryEntry& e) { return e.frame_index == frame; });
  };
  for (const MemoryEntry& e : bank.long_term) {
    if (!seen(e.frame_index)) out.push_back(e);
  }
  for (const MemoryEntry& e : bank.short_term) {
    if (!seen(e.frame_index)) out.push_back(e);
  }
  return out;
}

}  // namespace hiertrack
