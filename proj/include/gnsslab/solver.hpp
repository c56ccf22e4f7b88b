#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gnsslab/error.hpp"
#include "gnsslab/geo.hpp"
#include "gnsslab/measurement.hpp"

namespace gnsslab {

struct DopValues {
  double gdop = 0.0;
  double pdop = 0.0;
  double hdop = 0.0;
  double vdop = 0.0;
  double tdop = 0.0;
};

struct PvtSolution {
  EcefPosition position;
  double clock_bias = 0.0;      // s, receiver clock d_r
  std::vector<int> svns;        // satellites used, in input order
  std::vector<double> residuals;  // m, same order as svns
  int iterations = 0;
  bool converged = false;
  double last_step = 0.0;       // m, norm of the final state update
  DopValues dop;

  double residual_rms() const;
};

/// One pseudorange paired with the satellite state used to model it.
/// `modeled_delay` is subtracted from the measurement (e.g. a troposphere model).
struct RangeObservation {
  SatelliteState sat;
  double pseudorange = 0.0;
  double modeled_delay = 0.0;
};

struct ClockedPosition {
  EcefPosition position;
  double clock_bias = 0.0;
};

struct SolverOptions {
  int max_iterations = 20;
  double step_tolerance = 1e-8;  // m
  /// Steps below this that stop shrinking (less than halving) are at the
  /// floating-point floor of the problem and also count as converged. With
  /// ranges near 2e7 m the floor is a few nm times the DOP, which exceeds
  /// step_tolerance for poor four-satellite geometries.
  double stagnation_tolerance = 1e-6;  // m
  /// Restart from the trilaterated point when the first attempt does not converge.
  bool trilateration_fallback = true;
};

using GeometryMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

struct TrilaterationResult {
  EcefPosition point_a;
  EcefPosition point_b;
};

/// Raised by trilaterate_three_spheres when the spheres share no point.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, std::array<double, 3> violations)
      : Error(ErrorCode::NoSolution, what), violations_(violations) {}

  /// How far the closest in-plane point misses each sphere, m.
  const std::array<double, 3>& violations() const { return violations_; }

 private:
  std::array<double, 3> violations_;
};

TrilaterationResult trilaterate_three_spheres(const std::array<EcefPosition, 3>& centers,
                                              const std::array<double, 3>& ranges);

/// Picks the candidate whose radius is closer to the Earth's surface. Throws
/// Error(AmbiguousSolution) when both are within 1 m of each other on that score.
EcefPosition select_feasible(const TrilaterationResult& r);

/// Gauss-Newton on (x, y, z, receiver clock). Throws InsufficientSatellites
/// for fewer than four observations and DegenerateGeometry for a singular
/// normal matrix. Non-convergence is reported through `converged`.
PvtSolution solve_pvt(std::span<const RangeObservation> obs, const ClockedPosition& initial = {},
                      const SolverOptions& options = {});

/// As solve_pvt with the hard constraint |position| = earth_radius + altitude;
/// three satellites suffice.
PvtSolution solve_altitude_aided(std::span<const RangeObservation> obs, double known_altitude,
                                 const ClockedPosition& initial = {},
                                 const SolverOptions& options = {});

/// Row i is (-u_i, 1), u_i the unit vector from receiver to satellite i.
GeometryMatrix geometry_matrix(std::span<const EcefPosition> sats, const EcefPosition& rcvr);

/// DOP from Q = (G^T G)^-1; hdop and vdop use the local east-north-up frame at
/// `receiver`. Throws DegenerateGeometry when G^T G is singular.
DopValues dilution_of_precision(const GeometryMatrix& g, const EcefPosition& receiver);

/// Indices of the k-subset of `candidates` with the smallest GDOP, ascending.
/// Exhaustive; ties resolve to the lexicographically first subset. With
/// `altitude_constraint` the radial constraint row joins every subset and k may
/// be 3; good constrained geometry keeps the altitude-aided solve away from its
/// second root.
std::vector<std::size_t> select_lowest_gdop(std::span<const EcefPosition> candidates,
                                            const EcefPosition& receiver, int k,
                                            bool altitude_constraint = false);

inline constexpr double kExportAltitudeLimit = 18'000.0;  // m
inline constexpr double kExportSpeedLimit = 515.0;        // m/s

/// True (blocked) only when altitude and speed both exceed their limits.
bool export_limit_check(const EcefPosition& position, double speed);

}  // namespace gnsslab
