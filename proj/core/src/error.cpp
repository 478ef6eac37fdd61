#include "distrep/error.hpp"

namespace distrep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::EmptyPixelSet: return "EmptyPixelSet";
    case ErrorCode::DuplicatePixel: return "DuplicatePixel";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::ZeroAreaUnion: return "ZeroAreaUnion";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AllVoid: return "AllVoid";
    case ErrorCode::AllBackground: return "AllBackground";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::NoDetections: return "NoDetections";
    case ErrorCode::UnsatisfiableOverlap: return "UnsatisfiableOverlap";
    case ErrorCode::PlacementFailed: return "PlacementFailed";
    case ErrorCode::NoOverlappingPairs: return "NoOverlappingPairs";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace distrep
