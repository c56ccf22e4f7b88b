#pragma once

// Text formats. Numbers are written as fixed-point decimals through
// std::to_chars (locale independent, correctly rounded), so identical inputs
// give identical bytes on every platform.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gnsslab/dgps.hpp"
#include "gnsslab/measurement.hpp"
#include "gnsslab/solver.hpp"

namespace gnsslab::formats {

inline constexpr int kMeterDigits = 6;
inline constexpr int kDegreeDigits = 6;
inline constexpr int kCycleDigits = 9;
inline constexpr int kClockDigits = 12;

std::string fixed(double value, int digits);

/// Parses a decimal number; throws Error(Parse) on trailing garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

/// Value as it reads back from fixed(value, digits).
double quantize(double value, int digits);

// --- observation log ------------------------------------------------------

inline constexpr std::string_view kObservationHeader =
    "epoch_s,svn,pr_l1_m,pr_l2_m,phase_l1_cyc,phase_l2_cyc,elev_deg,azim_deg";

struct ObservationRow {
  double epoch_s = 0.0;
  int svn = 0;
  double pr_l1_m = 0.0;
  double pr_l2_m = 0.0;
  double phase_l1_cyc = 0.0;
  double phase_l2_cyc = 0.0;
  double elev_deg = 0.0;
  double azim_deg = 0.0;
};

std::vector<ObservationRow> to_rows(const ObservationEpoch& epoch);
std::string write_observation_rows(const std::vector<ObservationRow>& rows);
std::string write_observation_log(const std::vector<ObservationEpoch>& epochs);

/// Throws Error(Parse) naming the line for a bad header or row.
std::vector<ObservationRow> parse_observation_log(std::string_view text);

/// Groups rows by epoch (in file order). Satellite ids come from the
/// constellation; look-angle ranges are not logged and read back as NaN.
std::vector<ObservationEpoch> to_epochs(const std::vector<ObservationRow>& rows,
                                        const Constellation& constellation);

// --- correction stream ----------------------------------------------------

inline constexpr std::string_view kCorrectionHeader = "epoch_s,station_id,svn,prc_m";

struct CorrectionRow {
  double epoch_s = 0.0;
  std::string station_id;
  int svn = 0;
  double prc_m = 0.0;
};

std::string write_corrections(const std::vector<CorrectionSet>& sets);
std::vector<CorrectionRow> parse_corrections(std::string_view text);
std::string write_correction_rows(const std::vector<CorrectionRow>& rows);
std::vector<CorrectionSet> to_correction_sets(const std::vector<CorrectionRow>& rows);

// --- JSON-lines -----------------------------------------------------------

/// Solution record with quantized numbers: position, geodetic, clock, DOP,
/// residual rms, iterations.
nlohmann::ordered_json solution_record(Epoch epoch, const PvtSolution& sol);

std::string dump_line(const nlohmann::ordered_json& record);

}  // namespace gnsslab::formats
