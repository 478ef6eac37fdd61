#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace distrep {

enum class ErrorCode {
  NonPositiveSigma,
  RhoOutOfRange,
  NonFiniteValue,
  DegenerateCovariance,
  EmptyPixelSet,
  DuplicatePixel,
  InvalidBox,
  ZeroAreaUnion,
  InvalidScene,
  EmptyCandidateSet,
  InvalidGrid,
  ShapeMismatch,
  AllVoid,
  AllBackground,
  InvalidArgument,
  Diverged,
  NoDetections,
  UnsatisfiableOverlap,
  PlacementFailed,
  NoOverlappingPairs,
  InsufficientData,
  DimensionMismatch,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every distrep operation. The code is stable and
/// machine-readable; the message names the offending field or value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace distrep
