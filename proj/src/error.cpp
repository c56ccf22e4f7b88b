#include "gnsslab/error.hpp"

namespace gnsslab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::UndefinedDirection: return "undefined direction";
    case ErrorCode::CoincidentPoints: return "coincident points";
    case ErrorCode::BelowHorizon: return "below horizon";
    case ErrorCode::InsufficientSatellites: return "insufficient satellites";
    case ErrorCode::DegenerateGeometry: return "degenerate geometry";
    case ErrorCode::NoSolution: return "no solution";
    case ErrorCode::AmbiguousSolution: return "ambiguous solution";
    case ErrorCode::StationClock: return "cannot separate station clock";
    case ErrorCode::StaleCorrections: return "stale corrections";
    case ErrorCode::NoMatchedSatellites: return "no matched satellites";
    case ErrorCode::UnknownSatellite: return "unknown satellite";
    case ErrorCode::AmbiguityNotResolved: return "ambiguity not resolved";
    case ErrorCode::SearchTooLarge: return "radius too large";
    case ErrorCode::NotConverged: return "not converged";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Range: return "value out of range";
  }
  return "unknown error";
}

}  // namespace gnsslab
