#include "gnsslab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "gnsslab/constants.hpp"
#include "gnsslab/formats.hpp"

namespace gnsslab {

using constants::deg2rad;
using constants::rad2deg;

std::string_view to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Spp: return "spp";
    case SolverMode::IonoFree: return "iono-free";
    case SolverMode::AltitudeAided: return "altitude-aided";
  }
  return "spp";
}

std::optional<SolverMode> parse_solver_mode(std::string_view text) {
  if (text == "spp") return SolverMode::Spp;
  if (text == "iono-free") return SolverMode::IonoFree;
  if (text == "altitude-aided") return SolverMode::AltitudeAided;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scenario helpers

GeodeticPosition Scenario::receiver_at(double t) const {
  if (waypoints.empty()) return receiver;
  if (t <= waypoints.front().t) return waypoints.front().position;
  if (t >= waypoints.back().t) return waypoints.back().position;
  auto hi = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                             [](double v, const Waypoint& w) { return v < w.t; });
  auto lo = hi - 1;
  const double f = (t - lo->t) / (hi->t - lo->t);
  // Interpolate in ECEF so the path does not wrap around the antimeridian.
  const Eigen::Vector3d a = geodetic_to_ecef(lo->position).vec();
  const Eigen::Vector3d b = geodetic_to_ecef(hi->position).vec();
  GeodeticPosition g = ecef_to_geodetic(EcefPosition::from(a + f * (b - a)));
  g.altitude = lo->position.altitude + f * (hi->position.altitude - lo->position.altitude);
  return g;
}

BroadcastEphemeris Scenario::ephemeris() const {
  return BroadcastEphemeris(build_nominal_constellation(svn_base));
}

namespace {

constexpr std::uint64_t kRoverKey = 1;
constexpr std::uint64_t kStationKey = 2;

std::map<int, Eigen::Vector3d> ephemeris_offsets(const Scenario& s) {
  std::map<int, Eigen::Vector3d> out;
  if (s.ephemeris_sigma <= 0.0) return out;
  const NoiseStreams streams(s.seed, 0, 0);
  for (const auto& el : build_nominal_constellation(s.svn_base).satellites()) {
    auto rng = streams.common_stream(el.id.svn, 0.0, Draw::Ephemeris);
    Eigen::Vector3d v;
    for (int k = 0; k < 3; ++k) v[k] = s.ephemeris_sigma * standard_normal(rng);
    out[el.id.svn] = v;
  }
  return out;
}

ErrorBudget base_budget(const Scenario& s) {
  ErrorBudget b = s.errors;
  b.rng_seed = s.seed;
  b.iono = IonosphereModel::from_l1_delay(s.iono_l1_delay);
  b.ephemeris_error = ephemeris_offsets(s);
  return b;
}

}  // namespace

ErrorBudget Scenario::rover_budget() const {
  ErrorBudget b = base_budget(*this);
  b.receiver_key = kRoverKey;
  b.common_key = 0;
  return b;
}

ErrorBudget Scenario::station_budget() const {
  ErrorBudget b = base_budget(*this);
  b.receiver_key = kStationKey;
  b.common_key = 0;
  b.code_noise_sigma = station_code_noise_sigma;
  return b;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Shortest degree text that converts back to exactly `rad`. Angles that came
/// from text always have such a neighbor of rad2deg(rad); other angles are
/// first moved to the nearest value that does, so the text is a fixed point.
std::string degrees(double rad) {
  const auto candidates = [](double r) {
    std::vector<double> out{rad2deg(r)};
    double up = out[0], down = out[0];
    for (int step = 0; step < 8; ++step) {
      up = std::nextafter(up, std::numeric_limits<double>::infinity());
      down = std::nextafter(down, -std::numeric_limits<double>::infinity());
      out.push_back(up);
      out.push_back(down);
    }
    return out;
  };
  auto pool = candidates(rad);
  if (std::none_of(pool.begin(), pool.end(), [&](double d) { return deg2rad(d) == rad; })) {
    const double nearest = *std::min_element(pool.begin(), pool.end(), [&](double a, double b) {
      return std::abs(deg2rad(a) - rad) < std::abs(deg2rad(b) - rad);
    });
    rad = deg2rad(nearest);
    pool = candidates(rad);
  }
  std::string best;
  for (double d : pool) {
    if (deg2rad(d) != rad) continue;
    std::string text = shortest(d);
    if (best.empty() || text.size() < best.size() || (text.size() == best.size() && text < best)) {
      best = std::move(text);
    }
  }
  return best.empty() ? shortest(rad2deg(rad)) : best;
}

bool parse_switch(std::string_view v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw Error(ErrorCode::Parse, "expected on/off, got '" + std::string(v) + "'");
}

double parse_number(std::string_view v) {
  const double d = formats::parse_double(v);
  if (!std::isfinite(d)) throw Error(ErrorCode::Range, "value must be finite");
  return d;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Range, what);
}

std::vector<double> parse_numbers(std::string_view v, char sep) {
  std::vector<double> out;
  std::string s(v);
  std::replace(s.begin(), s.end(), sep, ' ');
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(parse_number(tok));
  return out;
}

GeodeticPosition parse_station(std::string_view v, std::string& name) {
  if (auto site = station_site(v)) {
    name = std::string(v);
    return *site;
  }
  const auto n = parse_numbers(v, ',');
  if (n.size() != 3) {
    throw Error(ErrorCode::Parse, "expected a site name or lat_deg,lon_deg,alt_m");
  }
  require(std::abs(n[0]) <= 90.0 && std::abs(n[1]) <= 180.0, "station coordinates out of range");
  name = "custom";
  return {deg2rad(n[0]), deg2rad(n[1]), n[2]};
}

using Setter = std::function<void(Scenario&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"constellation", [](Scenario&, std::string_view v) {
         if (v != "nominal") throw Error(ErrorCode::Parse, "only 'nominal' is supported");
       }},
      {"constellation.svn_base", [](Scenario& s, std::string_view v) {
         s.svn_base = static_cast<int>(formats::parse_integer(v));
         require(s.svn_base > 0, "svn_base must be positive");
       }},
      {"receiver.lat_deg", [](Scenario& s, std::string_view v) {
         const double d = parse_number(v);
         require(std::abs(d) <= 90.0, "latitude must lie in [-90, 90]");
         s.receiver.latitude = deg2rad(d);
       }},
      {"receiver.lon_deg", [](Scenario& s, std::string_view v) {
         const double d = parse_number(v);
         require(std::abs(d) <= 180.0, "longitude must lie in [-180, 180]");
         s.receiver.longitude = deg2rad(d);
       }},
      {"receiver.alt_m", [](Scenario& s, std::string_view v) { s.receiver.altitude = parse_number(v); }},
      {"receiver.clock_bias_s", [](Scenario& s, std::string_view v) { s.receiver_clock_bias = parse_number(v); }},
      {"receiver.waypoint", [](Scenario& s, std::string_view v) {
         const auto n = parse_numbers(v, ' ');
         if (n.size() != 4) throw Error(ErrorCode::Parse, "expected 't_s lat_deg lon_deg alt_m'");
         require(std::abs(n[1]) <= 90.0 && std::abs(n[2]) <= 180.0, "waypoint coordinates out of range");
         require(s.waypoints.empty() || n[0] > s.waypoints.back().t, "waypoint times must increase");
         s.waypoints.push_back({n[0], {deg2rad(n[1]), deg2rad(n[2]), n[3]}});
       }},
      {"epochs.start_s", [](Scenario& s, std::string_view v) { s.start = parse_number(v); }},
      {"epochs.step_s", [](Scenario& s, std::string_view v) {
         s.step = parse_number(v);
         require(s.step > 0.0, "step must be > 0");
       }},
      {"epochs.count", [](Scenario& s, std::string_view v) {
         s.count = static_cast<int>(formats::parse_integer(v));
         require(s.count >= 1, "count must be >= 1");
       }},
      {"mask_deg", [](Scenario& s, std::string_view v) {
         s.mask_deg = parse_number(v);
         require(s.mask_deg >= 0.0 && s.mask_deg < 90.0, "mask must lie in [0, 90)");
       }},
      {"seed", [](Scenario& s, std::string_view v) {
         const long long seed = formats::parse_integer(v);
         require(seed >= 0, "seed must be >= 0");
         s.seed = static_cast<std::uint64_t>(seed);
       }},
      {"errors.iono", [](Scenario& s, std::string_view v) { s.errors.iono_enabled = parse_switch(v); }},
      {"errors.iono_l1_delay_m", [](Scenario& s, std::string_view v) {
         s.iono_l1_delay = parse_number(v);
         require(s.iono_l1_delay >= 0.0, "ionospheric delay must be >= 0");
       }},
      {"errors.tropo", [](Scenario& s, std::string_view v) { s.errors.tropo_enabled = parse_switch(v); }},
      {"errors.tropo_zenith_dry_m", [](Scenario& s, std::string_view v) {
         s.errors.tropo.zenith_dry = parse_number(v);
         require(s.errors.tropo.zenith_dry >= 0.0, "zenith delay must be >= 0");
       }},
      {"errors.tropo_zenith_wet_m", [](Scenario& s, std::string_view v) {
         s.errors.tropo.zenith_wet = parse_number(v);
         require(s.errors.tropo.zenith_wet >= 0.0, "zenith delay must be >= 0");
       }},
      {"errors.multipath_amplitude_m", [](Scenario& s, std::string_view v) {
         s.errors.multipath_amplitude = parse_number(v);
         require(s.errors.multipath_amplitude >= 0.0, "amplitude must be >= 0");
       }},
      {"errors.code_noise_sigma_m", [](Scenario& s, std::string_view v) {
         s.errors.code_noise_sigma = parse_number(v);
         require(s.errors.code_noise_sigma >= 0.0, "sigma must be >= 0");
       }},
      {"errors.phase_noise_sigma_cyc", [](Scenario& s, std::string_view v) {
         s.errors.phase_noise_sigma = parse_number(v);
         require(s.errors.phase_noise_sigma >= 0.0, "sigma must be >= 0");
       }},
      {"errors.sa_sigma_m", [](Scenario& s, std::string_view v) {
         s.errors.sa_sigma = parse_number(v);
         require(s.errors.sa_sigma >= 0.0, "sigma must be >= 0");
       }},
      {"errors.ephemeris_sigma_m", [](Scenario& s, std::string_view v) {
         s.ephemeris_sigma = parse_number(v);
         require(s.ephemeris_sigma >= 0.0, "sigma must be >= 0");
       }},
      {"solver.mode", [](Scenario& s, std::string_view v) {
         auto m = parse_solver_mode(v);
         if (!m) throw Error(ErrorCode::Parse, "expected spp, iono-free or altitude-aided");
         s.mode = *m;
       }},
      {"solver.altitude_m", [](Scenario& s, std::string_view v) { s.altitude = parse_number(v); }},
      {"solver.model_troposphere", [](Scenario& s, std::string_view v) { s.model_troposphere = parse_switch(v); }},
      {"solver.max_iterations", [](Scenario& s, std::string_view v) {
         s.solver.max_iterations = static_cast<int>(formats::parse_integer(v));
         require(s.solver.max_iterations >= 1, "max_iterations must be >= 1");
       }},
      {"solver.step_tolerance_m", [](Scenario& s, std::string_view v) {
         s.solver.step_tolerance = parse_number(v);
         require(s.solver.step_tolerance > 0.0, "step tolerance must be > 0");
       }},
      {"dgps", [](Scenario& s, std::string_view v) { s.dgps = parse_switch(v); }},
      {"dgps.station", [](Scenario& s, std::string_view v) { s.station = parse_station(v, s.station_name); }},
      {"dgps.station_code_noise_sigma_m", [](Scenario& s, std::string_view v) {
         s.station_code_noise_sigma = parse_number(v);
         require(s.station_code_noise_sigma >= 0.0, "sigma must be >= 0");
       }},
      {"dgps.correlation_distance_km", [](Scenario& s, std::string_view v) {
         s.correlation_distance_km = parse_number(v);
         require(s.correlation_distance_km >= 0.0, "distance must be >= 0");
       }},
      {"dgps.staleness_s", [](Scenario& s, std::string_view v) {
         s.staleness = parse_number(v);
         require(s.staleness >= 0.0, "staleness window must be >= 0");
       }},
  };
  return table;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::set<std::string, std::less<>> seen;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Parse, where + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string at = where + ": " + std::string(key);
    auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::Parse, at + ": unknown key");
    if (value.empty()) throw Error(ErrorCode::Parse, at + ": missing value");
    if (key != "receiver.waypoint" && !seen.insert(std::string(key)).second) {
      throw Error(ErrorCode::Parse, at + ": duplicate key");
    }
    try {
      it->second(s, value);
    } catch (const Error& e) {
      throw Error(e.code(), at + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  return s;
}

std::string to_text(const Scenario& s) {
  std::ostringstream o;
  auto onoff = [](bool b) { return b ? "on" : "off"; };
  o << "constellation = nominal\n";
  o << "constellation.svn_base = " << s.svn_base << '\n';
  o << "receiver.lat_deg = " << degrees(s.receiver.latitude) << '\n';
  o << "receiver.lon_deg = " << degrees(s.receiver.longitude) << '\n';
  o << "receiver.alt_m = " << shortest(s.receiver.altitude) << '\n';
  o << "receiver.clock_bias_s = " << shortest(s.receiver_clock_bias) << '\n';
  for (const auto& w : s.waypoints) {
    o << "receiver.waypoint = " << shortest(w.t) << ' ' << degrees(w.position.latitude)
      << ' ' << degrees(w.position.longitude) << ' ' << shortest(w.position.altitude)
      << '\n';
  }
  o << "epochs.start_s = " << shortest(s.start) << '\n';
  o << "epochs.step_s = " << shortest(s.step) << '\n';
  o << "epochs.count = " << s.count << '\n';
  o << "mask_deg = " << shortest(s.mask_deg) << '\n';
  o << "seed = " << s.seed << '\n';
  o << "errors.iono = " << onoff(s.errors.iono_enabled) << '\n';
  o << "errors.iono_l1_delay_m = " << shortest(s.iono_l1_delay) << '\n';
  o << "errors.tropo = " << onoff(s.errors.tropo_enabled) << '\n';
  o << "errors.tropo_zenith_dry_m = " << shortest(s.errors.tropo.zenith_dry) << '\n';
  o << "errors.tropo_zenith_wet_m = " << shortest(s.errors.tropo.zenith_wet) << '\n';
  o << "errors.multipath_amplitude_m = " << shortest(s.errors.multipath_amplitude) << '\n';
  o << "errors.code_noise_sigma_m = " << shortest(s.errors.code_noise_sigma) << '\n';
  o << "errors.phase_noise_sigma_cyc = " << shortest(s.errors.phase_noise_sigma) << '\n';
  o << "errors.sa_sigma_m = " << shortest(s.errors.sa_sigma) << '\n';
  o << "errors.ephemeris_sigma_m = " << shortest(s.ephemeris_sigma) << '\n';
  o << "solver.mode = " << to_string(s.mode) << '\n';
  o << "solver.altitude_m = " << shortest(s.altitude) << '\n';
  o << "solver.model_troposphere = " << onoff(s.model_troposphere) << '\n';
  o << "solver.max_iterations = " << s.solver.max_iterations << '\n';
  o << "solver.step_tolerance_m = " << shortest(s.solver.step_tolerance) << '\n';
  o << "dgps = " << onoff(s.dgps) << '\n';
  if (s.station_name == "custom") {
    o << "dgps.station = " << degrees(s.station.latitude) << ','
      << degrees(s.station.longitude) << ',' << shortest(s.station.altitude) << '\n';
  } else {
    o << "dgps.station = " << s.station_name << '\n';
  }
  o << "dgps.station_code_noise_sigma_m = " << shortest(s.station_code_noise_sigma) << '\n';
  o << "dgps.correlation_distance_km = " << shortest(s.correlation_distance_km) << '\n';
  o << "dgps.staleness_s = " << shortest(s.staleness) << '\n';
  return o.str();
}

// ---------------------------------------------------------------------------
// Running

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

PvtSolution solve_epoch(const Scenario& s, const ObservationEpoch& epoch,
                        const BroadcastEphemeris& eph) {
  auto obs = range_observations(epoch, eph,
                                s.mode == SolverMode::IonoFree ? RangeMode::IonoFree : RangeMode::L1);
  if (s.model_troposphere) {
    const TroposphereModel model;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      obs[i].modeled_delay = tropo_delay(model, epoch.observations[i].look.elevation).total();
    }
  }
  if (s.mode == SolverMode::AltitudeAided) return solve_altitude_aided(obs, s.altitude, {}, s.solver);
  return solve_pvt(obs, {}, s.solver);
}

void score(EpochRecord& rec, const ReceiverState& truth) {
  const auto& sol = *rec.solution;
  const Eigen::Vector3d d = sol.position.vec() - truth.position.vec();
  const Eigen::Vector3d enu = enu_rotation(ecef_to_geodetic(truth.position)) * d;
  rec.error_3d = d.norm();
  rec.error_horizontal = enu.head<2>().norm();
  rec.error_vertical = enu.z();
  rec.clock_error = sol.clock_bias - truth.clock_bias;
}

}  // namespace

RunSummary summarize(const std::vector<EpochRecord>& records) {
  RunSummary out;
  CompensatedSum e3, eh, ev, ec, gd, pd;
  int dop_count = 0;
  for (const auto& r : records) {
    ++out.epochs;
    if (!r.solution) continue;
    ++out.solved;
    if (r.solution->converged) ++out.converged;
    e3.add(r.error_3d * r.error_3d);
    eh.add(r.error_horizontal * r.error_horizontal);
    ev.add(r.error_vertical * r.error_vertical);
    ec.add(r.clock_error * r.clock_error);
    if (std::isfinite(r.solution->dop.gdop)) {
      gd.add(r.solution->dop.gdop);
      pd.add(r.solution->dop.pdop);
      ++dop_count;
    }
  }
  if (out.solved > 0) {
    const double n = out.solved;
    out.rms_3d = std::sqrt(e3.value() / n);
    out.rms_horizontal = std::sqrt(eh.value() / n);
    out.rms_vertical = std::sqrt(ev.value() / n);
    out.rms_clock = std::sqrt(ec.value() / n);
  }
  if (dop_count > 0) {
    out.mean_gdop = gd.value() / dop_count;
    out.mean_pdop = pd.value() / dop_count;
  }
  return out;
}

std::string summary_json(const RunSummary& summary) {
  using formats::quantize;
  nlohmann::ordered_json j;
  j["epochs"] = summary.epochs;
  j["solved"] = summary.solved;
  j["converged"] = summary.converged;
  j["rms_3d_m"] = quantize(summary.rms_3d, formats::kMeterDigits);
  j["rms_horizontal_m"] = quantize(summary.rms_horizontal, formats::kMeterDigits);
  j["rms_vertical_m"] = quantize(summary.rms_vertical, formats::kMeterDigits);
  j["rms_clock_s"] = quantize(summary.rms_clock, formats::kClockDigits);
  j["mean_gdop"] = quantize(summary.mean_gdop, formats::kMeterDigits);
  j["mean_pdop"] = quantize(summary.mean_pdop, formats::kMeterDigits);
  return j.dump();
}

std::vector<ObservationEpoch> simulate_observations(const Scenario& s, Role role) {
  const BroadcastEphemeris eph = s.ephemeris();
  const double mask = deg2rad(s.mask_deg);
  const EcefPosition station = geodetic_to_ecef(s.station);
  const ErrorBudget station_budget = s.station_budget();
  station_budget.validate();
  std::vector<ObservationEpoch> log;
  for (int k = 0; k < s.count; ++k) {
    const Epoch t{s.epoch_time(k)};
    if (role == Role::Station) {
      log.push_back(simulate_epoch(eph, {station, 0.0}, t, mask, station_budget));
      continue;
    }
    const ReceiverState truth{geodetic_to_ecef(s.receiver_at(t.t)), s.receiver_clock_bias};
    ErrorBudget budget = s.rover_budget();
    if (s.dgps && (truth.position.vec() - station.vec()).norm() > s.correlation_distance_km * 1000.0) {
      budget.common_key = 1;  // satellite-side errors decorrelate beyond this distance
    }
    log.push_back(simulate_epoch(eph, truth, t, mask, budget));
  }
  return log;
}

RunReport run_scenario(const Scenario& s) {
  const BroadcastEphemeris eph = s.ephemeris();
  const ReferenceStation station{s.station_name, geodetic_to_ecef(s.station)};
  if (s.dgps) station.validate();

  RunReport report;
  report.config = to_text(s);
  report.seed = s.seed;
  const std::vector<ObservationEpoch> rover_log = simulate_observations(s, Role::Rover);
  std::vector<ObservationEpoch> station_log;
  std::vector<CorrectionSet> corrections;
  if (s.dgps) station_log = simulate_observations(s, Role::Station);

  for (std::size_t k = 0; k < rover_log.size(); ++k) {
    const ObservationEpoch& rover = rover_log[k];
    EpochRecord rec;
    rec.epoch = rover.epoch;
    try {
      if (s.dgps) {
        corrections.push_back(compute_corrections(station, station_log[k], eph));
        rec.solution = solve_corrected(rover, corrections.back(), eph, s.solver, s.staleness).solution;
      } else {
        rec.solution = solve_epoch(s, rover, eph);
      }
      score(rec, *rover.receiver_truth);
    } catch (const Error& e) {
      rec.solution.reset();
      rec.error = e.what();
    }
    report.records.push_back(std::move(rec));
  }

  report.summary = summarize(report.records);
  if (report.summary.solved == 0) {
    throw Error(ErrorCode::NoSolution, "every epoch failed; first error: " + report.records.front().error);
  }

  report.observations_csv = formats::write_observation_log(rover_log);
  if (s.dgps) {
    report.station_observations_csv = formats::write_observation_log(station_log);
    report.corrections_csv = formats::write_corrections(corrections);
  }
  for (const auto& r : report.records) {
    if (!r.solution) {
      nlohmann::ordered_json j;
      j["epoch_s"] = formats::quantize(r.epoch.t, formats::kMeterDigits);
      j["error"] = r.error;
      report.solutions_jsonl += formats::dump_line(j);
      continue;
    }
    auto j = formats::solution_record(r.epoch, *r.solution);
    j["error_3d_m"] = formats::quantize(r.error_3d, formats::kMeterDigits);
    report.solutions_jsonl += formats::dump_line(j);
  }
  report.summary_json = summary_json(report.summary);
  return report;
}

std::vector<DopMapRow> dop_map(const Scenario& s, double grid_deg) {
  if (!(grid_deg > 0.0 && grid_deg <= 90.0)) {
    throw Error(ErrorCode::Range, "grid spacing must lie in (0, 90] degrees");
  }
  const Constellation c = build_nominal_constellation(s.svn_base);
  const Epoch t{s.start};
  const double mask = deg2rad(s.mask_deg);
  const int lat_steps = static_cast<int>(std::floor(180.0 / grid_deg + 1e-9));
  const int lon_steps = static_cast<int>(std::ceil(360.0 / grid_deg - 1e-9));
  std::vector<DopMapRow> rows;
  for (int i = 0; i <= lat_steps; ++i) {
    const double lat = -90.0 + grid_deg * i;
    for (int j = 0; j < lon_steps; ++j) {
      const double lon = -180.0 + grid_deg * j;
      const GeodeticPosition obs{deg2rad(lat), deg2rad(lon), s.receiver.altitude};
      const auto vis = visible_satellites(c, obs, mask, t);
      DopMapRow row{lat, lon, static_cast<int>(vis.size()),
                    std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
      if (vis.size() >= 4) {
        std::vector<EcefPosition> sats;
        for (const auto& v : vis) sats.push_back(propagate(c.at(v.id.svn), t));
        const EcefPosition rcvr = geodetic_to_ecef(obs);
        try {
          const DopValues d = dilution_of_precision(geometry_matrix(sats, rcvr), rcvr);
          row.gdop = d.gdop;
          row.pdop = d.pdop;
        } catch (const Error&) {
          // left as NaN
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string write_dop_map(const std::vector<DopMapRow>& rows) {
  using formats::fixed;
  std::string out = "lat_deg,lon_deg,visible_count,gdop,pdop\n";
  for (const auto& r : rows) {
    out += fixed(r.lat_deg, formats::kDegreeDigits) + ',' + fixed(r.lon_deg, formats::kDegreeDigits) +
           ',' + std::to_string(r.visible) + ',' + fixed(r.gdop, formats::kMeterDigits) + ',' +
           fixed(r.pdop, formats::kMeterDigits) + '\n';
  }
  return out;
}

MonteCarloSummary run_monte_carlo(const Scenario& s, int trials, unsigned threads) {
  if (trials < 1) throw Error(ErrorCode::Range, "trials must be >= 1");
  std::vector<std::vector<EpochRecord>> records(static_cast<std::size_t>(trials));
  threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
  auto work = [&](unsigned worker) {
    for (int i = static_cast<int>(worker); i < trials; i += static_cast<int>(threads)) {
      Scenario trial = s;
      trial.seed = s.seed + static_cast<std::uint64_t>(i);
      try {
        records[static_cast<std::size_t>(i)] = run_scenario(trial).records;
      } catch (const Error&) {
        // every epoch failed; an empty record list counts against the trial
      }
    }
  };
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < threads; ++w) jobs.push_back(std::async(std::launch::async, work, w));
  for (auto& j : jobs) j.get();

  MonteCarloSummary out;
  out.trials = trials;
  std::vector<EpochRecord> all;
  for (const auto& r : records) {
    out.per_trial.push_back(summarize(r));
    all.insert(all.end(), r.begin(), r.end());
  }
  out.aggregate = summarize(all);
  return out;
}

}  // namespace gnsslab
