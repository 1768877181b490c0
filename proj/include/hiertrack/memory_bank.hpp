#pragma once

#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "hiertrack/mask_geometry.hpp"
#include "hiertrack/selector.hpp"

namespace hiertrack {

struct MemoryEntry {
  int frame_index = 0;
  BinaryMask mask;
  double s_conf = 0.0;
  double s_iou = 0.0;
  bool distinctive = false;
  double separation = 0.0;  // fraction of the image diagonal

  friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

struct MemoryConfig {
  double theta_iou = 0.7;
  double theta_motion = 0.5;
  double theta_dist = 0.04;
  int n_sm = 6;
  int n_lm = 8;
  int k_sm = 1;
  int k_lm = 5;
  // Off: the short bank keeps only the latest frame, whatever its confidence.
  bool short_filtered = true;
  bool long_enabled = true;
};

struct MemoryBank {
  MemoryEntry prompt;
  std::deque<MemoryEntry> short_term;
  std::vector<MemoryEntry> long_term;  // ascending frame_index
  long qualifying_frames = 0;
  long distinctive_frames = 0;
};

MemoryBank make_bank(const BinaryMask& prompt_mask, int prompt_frame = 0);

bool is_high_confidence(const FrameDecision& decision, const MemoryConfig& cfg);

/// Directed Hausdorff from each non-empty alternative's contour to the chosen
/// contour, max over alternatives, normalized by `image_diag`.
std::pair<bool, double> is_distinctive(const BinaryMask& chosen_mask,
                                       std::span<const BinaryMask> alternative_masks,
                                       double image_diag, double theta_dist);

/// `proposals` are this frame's proposals; decision.chosen indexes into them.
MemoryBank admit(MemoryBank bank, const FrameDecision& decision, std::span<const Proposal> proposals,
                 const MemoryConfig& cfg);

/// Prompt, then long entries, then short entries; a frame held in both banks
/// appears once, from the long bank.
std::vector<MemoryEntry> conditioning_set(const MemoryBank& bank);

}  // namespace hiertrack
