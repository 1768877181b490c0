#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hiertrack {

enum class Errc {
  EmptyMask,
  EmptyContour,
  DimensionMismatch,
  InvalidMask,
  NotInitialized,
  NoProposals,
  WeightViolation,
  TrackSourceFailure,
  PointOffTarget,
  InvalidScene,
  InvalidConfig,
  EmptySequence,
  LengthMismatch,
  FrameIndexGap,
  MissingPrompt,
  SchemaVersionMismatch,
  ParseError,
  IOFailure,
  EmptyGrid,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library; `code()` carries the error kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hiertrack
