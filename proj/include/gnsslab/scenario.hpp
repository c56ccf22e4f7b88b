#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnsslab/dgps.hpp"
#include "gnsslab/measurement.hpp"
#include "gnsslab/solver.hpp"

namespace gnsslab {

enum class SolverMode { Spp, IonoFree, AltitudeAided };

std::string_view to_string(SolverMode mode);
std::optional<SolverMode> parse_solver_mode(std::string_view text);

struct Waypoint {
  double t = 0.0;  // s
  GeodeticPosition position;
};

/// Everything a run needs. Text form: one `key = value` per line, `#`
/// comments. Keys (defaults in parentheses):
///
///   constellation              nominal (nominal)
///   constellation.svn_base     first SVN (1)
///   receiver.lat_deg / receiver.lon_deg / receiver.alt_m   static position (0 / 0 / 0)
///   receiver.clock_bias_s      receiver clock offset (0)
///   receiver.waypoint          `t_s lat_deg lon_deg alt_m`, repeatable; linear
///                              interpolation, clamped at the ends
///   epochs.start_s / epochs.step_s / epochs.count   (0 / 30 / 1)
///   mask_deg                   elevation mask, [0, 90) (15)
///   seed                       RNG seed (1)
///   errors.iono                on|off (off)
///   errors.iono_l1_delay_m     first-order L1 delay, sets a (5)
///   errors.tropo               on|off (off)
///   errors.tropo_zenith_dry_m / errors.tropo_zenith_wet_m   (2.25 / 0.25)
///   errors.multipath_amplitude_m   (0)
///   errors.code_noise_sigma_m      (1)
///   errors.phase_noise_sigma_cyc   (0.01)
///   errors.sa_sigma_m              (0)
///   errors.ephemeris_sigma_m       per-axis sigma of a fixed per-satellite offset (0)
///   solver.mode                spp|iono-free|altitude-aided (spp)
///   solver.altitude_m          known altitude for altitude-aided (0)
///   solver.model_troposphere   subtract the default troposphere model (false)
///   solver.max_iterations      (20)
///   solver.step_tolerance_m    (1e-8)
///   dgps                       on|off (off)
///   dgps.station               preset site name or `lat_deg,lon_deg,alt_m` (hawaii)
///   dgps.station_code_noise_sigma_m  (0)
///   dgps.correlation_distance_km     satellite-side errors are shared within this
///                                    distance and independent beyond it (200)
///   dgps.staleness_s                 (5)
struct Scenario {
  int svn_base = 1;
  GeodeticPosition receiver;
  double receiver_clock_bias = 0.0;
  std::vector<Waypoint> waypoints;
  double start = 0.0;
  double step = 30.0;
  int count = 1;
  double mask_deg = 15.0;
  std::uint64_t seed = 1;

  ErrorBudget errors;
  double iono_l1_delay = 5.0;
  double ephemeris_sigma = 0.0;

  SolverMode mode = SolverMode::Spp;
  double altitude = 0.0;
  bool model_troposphere = false;
  SolverOptions solver;

  bool dgps = false;
  std::string station_name = "hawaii";
  GeodeticPosition station = *station_site("hawaii");
  double station_code_noise_sigma = 0.0;
  double correlation_distance_km = 200.0;
  double staleness = kDefaultStalenessWindow;

  /// Receiver truth at time t (static position or waypoint interpolation).
  GeodeticPosition receiver_at(double t) const;
  /// Error budgets with seed and stream keys filled in.
  ErrorBudget rover_budget() const;
  ErrorBudget station_budget() const;
  BroadcastEphemeris ephemeris() const;
  double epoch_time(int k) const { return start + step * k; }
};

/// Throws Error(Parse) or Error(Range) naming the line number and key.
Scenario parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(to_text(s)) reproduces s.
std::string to_text(const Scenario& s);

struct EpochRecord {
  Epoch epoch;
  std::optional<PvtSolution> solution;
  std::string error;         // set when the epoch failed
  double error_3d = 0.0;     // m, vs truth
  double error_horizontal = 0.0;
  double error_vertical = 0.0;
  double clock_error = 0.0;  // s
};

struct RunSummary {
  int epochs = 0;
  int solved = 0;
  int converged = 0;
  double rms_3d = 0.0;
  double rms_horizontal = 0.0;
  double rms_vertical = 0.0;
  double rms_clock = 0.0;
  double mean_gdop = 0.0;
  double mean_pdop = 0.0;
};

struct RunReport {
  std::vector<EpochRecord> records;
  RunSummary summary;
  std::string config;  // to_text of the scenario
  std::uint64_t seed = 0;
  std::string observations_csv;
  std::string station_observations_csv;  // DGPS runs only
  std::string corrections_csv;           // DGPS runs only
  std::string solutions_jsonl;
  std::string summary_json;
};

enum class Role { Rover, Station };

/// Observation log for the rover (scenario trajectory) or the DGPS reference
/// station (surveyed position, zero clock). Epochs are in time order.
std::vector<ObservationEpoch> simulate_observations(const Scenario& s, Role role);

/// Simulate, optionally correct, and solve every epoch. Failed epochs are
/// recorded; throws only when every epoch fails.
RunReport run_scenario(const Scenario& s);

RunSummary summarize(const std::vector<EpochRecord>& records);

struct DopMapRow {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  int visible = 0;
  double gdop = 0.0;  // NaN below four satellites
  double pdop = 0.0;
};

/// Grid over lat [-90, 90] and lon [-180, 180) at the scenario's first epoch.
std::vector<DopMapRow> dop_map(const Scenario& s, double grid_deg);
std::string write_dop_map(const std::vector<DopMapRow>& rows);

struct MonteCarloSummary {
  int trials = 0;
  RunSummary aggregate;       // over every epoch of every trial
  std::vector<RunSummary> per_trial;
};

/// Trial i runs with seed s.seed + i; results are independent of `threads`.
MonteCarloSummary run_monte_carlo(const Scenario& s, int trials, unsigned threads = 0);

std::string summary_json(const RunSummary& summary);

}  // namespace gnsslab
