#include "hiertrack/error.hpp"

namespace hiertrack {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::EmptyContour: return "EmptyContour";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidMask: return "InvalidMask";
    case Errc::NotInitialized: return "NotInitialized";
    case Errc::NoProposals: return "NoProposals";
    case Errc::WeightViolation: return "WeightViolation";
    case Errc::TrackSourceFailure: return "TrackSourceFailure";
    case Errc::PointOffTarget: return "PointOffTarget";
    case Errc::InvalidScene: return "InvalidScene";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::FrameIndexGap: return "FrameIndexGap";
    case Errc::MissingPrompt: return "MissingPrompt";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::IOFailure: return "IOFailure";
    case Errc::EmptyGrid: return "EmptyGrid";
  }
  return "Unknown";
}

}  // namespace hiertrack
