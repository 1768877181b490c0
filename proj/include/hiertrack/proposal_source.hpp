#pragma once

#include <span>
#include <vector>

#include "hiertrack/memory_bank.hpp"
#include "hiertrack/selector.hpp"

namespace hiertrack {

/// Stand-in for the segmenter: yields the candidate masks for a frame given the
/// memory it is conditioned on.
class ProposalSource {
 public:
  virtual ~ProposalSource() = default;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual int frame_count() const = 0;
  virtual BinaryMask prompt_mask() const = 0;
  virtual std::vector<Proposal> proposals(int frame_index, std::span<const MemoryEntry> conditioning) = 0;
};

}  // namespace hiertrack
