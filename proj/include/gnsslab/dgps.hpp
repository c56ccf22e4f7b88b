#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnsslab/measurement.hpp"
#include "gnsslab/solver.hpp"

namespace gnsslab {

struct ReferenceStation {
  std::string id;
  EcefPosition surveyed_position;

  /// Throws Error(Range) unless the station lies within 10 km of the surface.
  void validate() const;
};

/// Approximate coordinates of the monitor-station sites, usable as scenario
/// presets: hawaii, kwajalein, diego-garcia, ascension, colorado-springs.
std::optional<GeodeticPosition> station_site(std::string_view name);
std::vector<std::string> station_site_names();

struct CorrectionSet {
  Epoch epoch;
  std::string station;
  std::map<int, double> prc;  // svn -> pseudorange correction, m
  double station_clock = 0.0;  // m, common term removed from the raw differences
};

/// Station clock is the median of the raw (expected - measured) differences;
/// prc = raw - median. Throws Error(StationClock) below four satellites.
CorrectionSet compute_corrections(const ReferenceStation& station, const ObservationEpoch& obs,
                                  const BroadcastEphemeris& eph);

inline constexpr double kDefaultStalenessWindow = 5.0;  // s

struct CorrectedEpoch {
  ObservationEpoch epoch;
  int dropped = 0;  // rover satellites without a correction
};

/// pr + prc on both frequencies for every matched satellite. Throws
/// Error(StaleCorrections) when |rover epoch - correction epoch| exceeds the
/// window and Error(NoMatchedSatellites) when nothing matches.
CorrectedEpoch apply_corrections(const ObservationEpoch& rover, const CorrectionSet& corr,
                                 double staleness_window = kDefaultStalenessWindow);

enum class RangeMode { L1, IonoFree };

/// Pairs each observation with its broadcast satellite state.
std::vector<RangeObservation> range_observations(const ObservationEpoch& obs,
                                                 const BroadcastEphemeris& eph,
                                                 RangeMode mode = RangeMode::L1);

struct CorrectedSolution {
  Epoch epoch;
  PvtSolution solution;
  std::string station;
  Epoch correction_epoch;
  int dropped = 0;
};

struct CorrectedSolutionLog {
  std::vector<CorrectedSolution> entries;  // strictly increasing epochs
  std::vector<Epoch> skipped;              // rover epochs without usable corrections
  std::vector<std::string> skip_reasons;
};

/// The shared per-epoch arithmetic: apply corrections, then solve on L1.
CorrectedSolution solve_corrected(const ObservationEpoch& rover, const CorrectionSet& corr,
                                  const BroadcastEphemeris& eph, const SolverOptions& options = {},
                                  double staleness_window = kDefaultStalenessWindow);

/// Streams both logs in epoch order: each rover epoch uses the latest
/// correction set generated at or before it.
CorrectedSolutionLog real_time_dgps(std::span<const ObservationEpoch> rover_log,
                                    std::span<const ObservationEpoch> ref_log,
                                    const ReferenceStation& station, const BroadcastEphemeris& eph,
                                    const SolverOptions& options = {},
                                    double staleness_window = kDefaultStalenessWindow);

/// Merges recorded logs after the fact; only exactly matching epochs are used.
CorrectedSolutionLog post_process(std::span<const ObservationEpoch> rover_log,
                                  std::span<const ObservationEpoch> ref_log,
                                  const ReferenceStation& station, const BroadcastEphemeris& eph,
                                  const SolverOptions& options = {});

/// A rover's standard fix as reported to a central station.
struct FleetReport {
  std::string rover_id;
  Epoch epoch;
  PvtSolution fix;                       // fix.svns lists the satellites used
  std::vector<SatelliteState> satellites;  // same order as fix.svns
};

struct InvertedFix {
  std::string rover_id;
  Epoch epoch;
  EcefPosition position;
  double clock_bias = 0.0;
};

/// First-order projection of the range corrections through each rover's
/// geometry: delta = (G^T G)^-1 G^T prc. Throws Error(UnknownSatellite) when a
/// report uses a satellite absent from the correction set.
std::vector<InvertedFix> inverted_dgps(std::span<const FleetReport> reports,
                                       const CorrectionSet& corr);

}  // namespace gnsslab
