#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnsslab/measurement.hpp"
#include "gnsslab/solver.hpp"

namespace gnsslab {

/// L1 carrier phase for one satellite, cycles.
struct PhaseObservation {
  SatelliteState sat;
  double phase_l1 = 0.0;
};

struct AmbiguityEntry {
  int svn = 0;
  double float_estimate = 0.0;   // cycles
  std::int64_t resolved = 0;     // cycles, valid when AmbiguitySet::resolved
  double residual = 0.0;         // cycles, post-fit residual of the fixed solution
};

struct AmbiguitySet {
  std::vector<AmbiguityEntry> entries;  // same order as the phase observations
  bool resolved = false;
  double best_score = 0.0;    // m^2, residual sum of squares of the chosen vector
  double second_score = 0.0;  // m^2, next best candidate
  double ratio = 0.0;         // second_score / best_score
  std::uint64_t candidates = 0;
  std::size_t reference = 0;  // index whose integer is pinned to its rounded float
};

struct AmbiguitySearchOptions {
  int radius = 3;                 // cycles around each rounded float
  double ratio_threshold = 1.5;
  std::uint64_t max_candidates = 10'000'000;
  unsigned threads = 0;           // 0 = hardware concurrency
};

/// float_i = phase_i - (range + c d_s - c d_r) / lambda_L1 at the code fix.
/// Throws Error(NotConverged) for an unconverged code solution.
AmbiguitySet float_ambiguities(const PvtSolution& code_solution,
                               std::span<const PhaseObservation> phase_obs);

/// Bounded integer search. The receiver clock absorbs any common integer
/// shift, so the reference satellite's integer stays at its rounded float and
/// the others range over +-radius. Each candidate is scored by the residual
/// sum of squares of the position/clock fit with those integers fixed,
/// linearized at the code solution. Needs five satellites. Throws
/// Error(SearchTooLarge) beyond max_candidates and
/// Error(AmbiguityNotResolved) when the ratio test fails.
AmbiguitySet resolve_integers(const AmbiguitySet& floats,
                              std::span<const PhaseObservation> phase_obs,
                              const PvtSolution& code_solution,
                              const AmbiguitySearchOptions& options = {});

/// Gauss-Newton on (phase - N) * lambda_L1 as precise pseudoranges.
PvtSolution phase_position(std::span<const PhaseObservation> phase_obs,
                           const AmbiguitySet& resolved, const PvtSolution& initial,
                           const SolverOptions& options = {});

}  // namespace gnsslab
