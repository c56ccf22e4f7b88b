#include "gnsslab/formats.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"

namespace gnsslab::formats {

using constants::deg2rad;
using constants::rad2deg;

std::string fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  if (res.ec != std::errc{}) throw Error(ErrorCode::Range, "value too large to format");
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto res = std::from_chars(first, text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::Parse, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::Parse, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

double quantize(double value, int digits) {
  if (!std::isfinite(value)) return value;
  return parse_double(fixed(value, digits));
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Calls fn(line_number, line) for each non-empty line after the header.
template <typename Fn>
void for_each_data_line(std::string_view text, std::string_view header, Fn fn) {
  std::size_t start = 0;
  int line_no = 0;
  bool seen_header = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected header '" +
                                          std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    try {
      fn(line_no, line);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!seen_header) throw Error(ErrorCode::Parse, "missing header");
}

}  // namespace

std::vector<ObservationRow> to_rows(const ObservationEpoch& epoch) {
  std::vector<ObservationRow> rows;
  for (const auto& o : epoch.observations) {
    rows.push_back({epoch.epoch.t, o.code.sat.svn, o.code.pr_l1, o.code.pr_l2, o.phase.phase_l1,
                    o.phase.phase_l2, rad2deg(o.look.elevation), rad2deg(o.look.azimuth)});
  }
  return rows;
}

std::string write_observation_rows(const std::vector<ObservationRow>& rows) {
  std::string out(kObservationHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fixed(r.epoch_s, kMeterDigits);
    out += ',';
    out += std::to_string(r.svn);
    out += ',';
    out += fixed(r.pr_l1_m, kMeterDigits);
    out += ',';
    out += fixed(r.pr_l2_m, kMeterDigits);
    out += ',';
    out += fixed(r.phase_l1_cyc, kCycleDigits);
    out += ',';
    out += fixed(r.phase_l2_cyc, kCycleDigits);
    out += ',';
    out += fixed(r.elev_deg, kDegreeDigits);
    out += ',';
    out += fixed(r.azim_deg, kDegreeDigits);
    out += '\n';
  }
  return out;
}

std::string write_observation_log(const std::vector<ObservationEpoch>& epochs) {
  std::vector<ObservationRow> rows;
  for (const auto& e : epochs) {
    auto r = to_rows(e);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return write_observation_rows(rows);
}

std::vector<ObservationRow> parse_observation_log(std::string_view text) {
  std::vector<ObservationRow> rows;
  for_each_data_line(text, kObservationHeader, [&](int, std::string_view line) {
    const auto f = split(line, ',');
    if (f.size() != 8) throw Error(ErrorCode::Parse, "expected 8 fields, got " + std::to_string(f.size()));
    ObservationRow r;
    r.epoch_s = parse_double(f[0]);
    r.svn = static_cast<int>(parse_integer(f[1]));
    r.pr_l1_m = parse_double(f[2]);
    r.pr_l2_m = parse_double(f[3]);
    r.phase_l1_cyc = parse_double(f[4]);
    r.phase_l2_cyc = parse_double(f[5]);
    r.elev_deg = parse_double(f[6]);
    r.azim_deg = parse_double(f[7]);
    rows.push_back(r);
  });
  return rows;
}

std::vector<ObservationEpoch> to_epochs(const std::vector<ObservationRow>& rows,
                                        const Constellation& constellation) {
  std::vector<ObservationEpoch> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back().epoch.t != r.epoch_s) {
      out.push_back({});
      out.back().epoch = Epoch{r.epoch_s};
    }
    auto& e = out.back();
    for (const auto& o : e.observations) {
      if (o.code.sat.svn == r.svn) {
        throw Error(ErrorCode::Parse, "duplicate svn " + std::to_string(r.svn) + " at epoch " +
                                          fixed(r.epoch_s, kMeterDigits));
      }
    }
    const SatelliteId id = constellation.at(r.svn).id;
    SatelliteObservation o;
    o.code = {id, r.pr_l1_m, r.pr_l2_m, e.epoch};
    o.phase.sat = id;
    o.phase.phase_l1 = r.phase_l1_cyc;
    o.phase.phase_l2 = r.phase_l2_cyc;
    o.phase.epoch = e.epoch;
    o.look = {deg2rad(r.elev_deg), deg2rad(r.azim_deg), std::numeric_limits<double>::quiet_NaN()};
    e.observations.push_back(o);
  }
  return out;
}

std::string write_correction_rows(const std::vector<CorrectionRow>& rows) {
  std::string out(kCorrectionHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fixed(r.epoch_s, kMeterDigits);
    out += ',';
    out += r.station_id;
    out += ',';
    out += std::to_string(r.svn);
    out += ',';
    out += fixed(r.prc_m, kMeterDigits);
    out += '\n';
  }
  return out;
}

std::string write_corrections(const std::vector<CorrectionSet>& sets) {
  std::vector<CorrectionRow> rows;
  for (const auto& s : sets) {
    for (const auto& [svn, prc] : s.prc) rows.push_back({s.epoch.t, s.station, svn, prc});
  }
  return write_correction_rows(rows);
}

std::vector<CorrectionRow> parse_corrections(std::string_view text) {
  std::vector<CorrectionRow> rows;
  for_each_data_line(text, kCorrectionHeader, [&](int, std::string_view line) {
    const auto f = split(line, ',');
    if (f.size() != 4) throw Error(ErrorCode::Parse, "expected 4 fields, got " + std::to_string(f.size()));
    if (f[1].empty()) throw Error(ErrorCode::Parse, "empty station id");
    rows.push_back({parse_double(f[0]), std::string(f[1]), static_cast<int>(parse_integer(f[2])),
                    parse_double(f[3])});
  });
  return rows;
}

std::vector<CorrectionSet> to_correction_sets(const std::vector<CorrectionRow>& rows) {
  std::vector<CorrectionSet> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back().epoch.t != r.epoch_s || out.back().station != r.station_id) {
      out.push_back({Epoch{r.epoch_s}, r.station_id, {}, 0.0});
    }
    out.back().prc[r.svn] = r.prc_m;
  }
  return out;
}

nlohmann::ordered_json solution_record(Epoch epoch, const PvtSolution& sol) {
  const GeodeticPosition g = ecef_to_geodetic(sol.position);
  auto q = [](double v, int digits) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return quantize(v, digits);
  };
  nlohmann::ordered_json j;
  j["epoch_s"] = q(epoch.t, kMeterDigits);
  j["x_m"] = q(sol.position.x, kMeterDigits);
  j["y_m"] = q(sol.position.y, kMeterDigits);
  j["z_m"] = q(sol.position.z, kMeterDigits);
  j["lat_deg"] = q(rad2deg(g.latitude), kDegreeDigits);
  j["lon_deg"] = q(rad2deg(g.longitude), kDegreeDigits);
  j["alt_m"] = q(g.altitude, kMeterDigits);
  j["clock_s"] = q(sol.clock_bias, kClockDigits);
  j["gdop"] = q(sol.dop.gdop, kMeterDigits);
  j["pdop"] = q(sol.dop.pdop, kMeterDigits);
  j["hdop"] = q(sol.dop.hdop, kMeterDigits);
  j["vdop"] = q(sol.dop.vdop, kMeterDigits);
  j["tdop"] = q(sol.dop.tdop, kMeterDigits);
  j["residual_rms_m"] = q(sol.residual_rms(), kMeterDigits);
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["satellites"] = sol.svns;
  return j;
}

std::string dump_line(const nlohmann::ordered_json& record) { return record.dump() + '\n'; }

}  // namespace gnsslab::formats
