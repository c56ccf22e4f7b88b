#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gnsslab/atmosphere.hpp"
#include "gnsslab/constellation.hpp"
#include "gnsslab/geo.hpp"
#include "gnsslab/rng.hpp"

namespace gnsslab {

struct ReceiverState {
  EcefPosition position;
  double clock_bias = 0.0;  // s, d_r
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

struct SatelliteState {
  SatelliteId id;
  EcefPosition position;
  double clock_bias = 0.0;  // s, d_s
};

/// What the receiver is told about the satellites: nominal orbits plus
/// broadcast clock offsets (missing entries are zero).
class BroadcastEphemeris {
 public:
  BroadcastEphemeris() = default;
  explicit BroadcastEphemeris(Constellation constellation,
                              std::map<int, double> clock_bias = {})
      : constellation_(std::move(constellation)), clock_bias_(std::move(clock_bias)) {}

  const Constellation& constellation() const { return constellation_; }
  SatelliteState state(int svn, Epoch t) const;

 private:
  Constellation constellation_;
  std::map<int, double> clock_bias_;
};

struct ErrorBudget {
  IonosphereModel iono;
  bool iono_enabled = false;
  TroposphereModel tropo;
  bool tropo_enabled = false;
  double multipath_amplitude = 0.0;  // m
  double code_noise_sigma = 1.0;     // m
  double phase_noise_sigma = 0.01;   // cycles
  double sa_sigma = 0.0;             // m, satellite clock dither
  std::map<int, Eigen::Vector3d> ephemeris_error;  // true minus broadcast position, by svn
  std::uint64_t rng_seed = 0;
  std::uint64_t receiver_key = 0;  // keys receiver-side noise and ambiguities
  std::uint64_t common_key = 0;    // keys satellite-side errors shared between receivers

  /// Throws Error(Range) when a sigma is negative.
  void validate() const;
  NoiseStreams streams() const { return {rng_seed, receiver_key, common_key}; }
};

struct PseudorangeObservation {
  SatelliteId sat;
  double pr_l1 = 0.0;  // m
  double pr_l2 = 0.0;  // m
  Epoch epoch;
};

struct CarrierPhaseObservation {
  SatelliteId sat;
  double phase_l1 = 0.0;  // cycles
  double phase_l2 = 0.0;  // cycles
  std::optional<std::int64_t> ambiguity_l1;  // simulation truth, absent for logged data
  std::optional<std::int64_t> ambiguity_l2;
  Epoch epoch;
};

struct SatelliteObservation {
  PseudorangeObservation code;
  CarrierPhaseObservation phase;
  LookAngles look;
};

struct ObservationEpoch {
  Epoch epoch;
  std::optional<ReceiverState> receiver_truth;
  std::vector<SatelliteObservation> observations;
};

/// Integer ambiguities are drawn uniformly from [-kAmbiguitySpan, kAmbiguitySpan].
inline constexpr std::int64_t kAmbiguitySpan = 50;

/// Throws Error(CoincidentPoints) for identical points.
double true_range(const EcefPosition& sat, const EcefPosition& rcvr);

/// amplitude * exp(-elevation / 10 deg)
double multipath_bias(double amplitude, double elevation);

/// `sat` carries the true satellite position and broadcast clock. Throws
/// Error(BelowHorizon) when look.elevation <= 0.
PseudorangeObservation simulate_pseudorange(const SatelliteState& sat, const ReceiverState& rcvr,
                                            const LookAngles& look, const ErrorBudget& budget,
                                            const NoiseStreams& streams, Epoch t);

CarrierPhaseObservation simulate_carrier_phase(const SatelliteState& sat,
                                               const ReceiverState& rcvr, const LookAngles& look,
                                               const ErrorBudget& budget,
                                               const NoiseStreams& streams, Epoch t);

/// One observation per satellite at or above `mask`, ordered by descending
/// elevation. Bit-identical for identical inputs.
ObservationEpoch simulate_epoch(const BroadcastEphemeris& eph, const ReceiverState& rcvr, Epoch t,
                                double mask, const ErrorBudget& budget);

}  // namespace gnsslab
