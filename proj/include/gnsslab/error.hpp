#pragma once

#include <stdexcept>
#include <string>

namespace gnsslab {

enum class ErrorCode {
  InvalidArgument,
  UndefinedDirection,
  CoincidentPoints,
  BelowHorizon,
  InsufficientSatellites,
  DegenerateGeometry,
  NoSolution,
  AmbiguousSolution,
  StationClock,
  StaleCorrections,
  NoMatchedSatellites,
  UnknownSatellite,
  AmbiguityNotResolved,
  SearchTooLarge,
  NotConverged,
  Parse,
  Range,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gnsslab
