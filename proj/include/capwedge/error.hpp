#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capwedge {

enum class ErrorCode {
  InvalidAngle,
  ArcsCross,
  InvalidArc,
  OutOfRange,
  TooCoarse,
  QualityFailure,
  NegativeCurvatureBound,
  OutsideFootprint,
  SingularPoint,
  BandTooNarrow,
  BetaOutOfRange,
  WallNotInFootprint,
  BadAngleOrder,
  MuOutOfRange,
  Condition1Violated,
  ConditionViolated,
  NoConvergence,
  IllPosed,
  LineSearchStalled,
  RayOutsideDomain,
  BelowResolution,
  FitIllConditioned,
  NoisyProfile,
  DeltaOutOfRange,
  BarrierFootprintMiss,
  PreconditionsUnmet,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the named failure kinds of the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace capwedge
