#include "gnsslab/dgps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "gnsslab/constants.hpp"
#include "gnsslab/kernels.hpp"

namespace gnsslab {

using constants::deg2rad;
using constants::kEarthRadius;
using constants::kSpeedOfLight;

void ReferenceStation::validate() const {
  if (std::abs(surveyed_position.norm() - kEarthRadius) > 10'000.0) {
    throw Error(ErrorCode::Range, "reference station " + id + " is not within 10 km of the surface");
  }
}

namespace {

struct Site {
  const char* name;
  double lat_deg, lon_deg, alt_m;
};

// Rounded atlas coordinates.
constexpr Site kSites[] = {
    {"hawaii", 21.56, -158.24, 0.0},
    {"kwajalein", 8.72, 167.73, 0.0},
    {"diego-garcia", -7.27, 72.37, 0.0},
    {"ascension", -7.95, -14.36, 0.0},
    {"colorado-springs", 38.80, -104.53, 1880.0},
};

}  // namespace

std::optional<GeodeticPosition> station_site(std::string_view name) {
  for (const auto& s : kSites) {
    if (name == s.name) return GeodeticPosition{deg2rad(s.lat_deg), deg2rad(s.lon_deg), s.alt_m};
  }
  return std::nullopt;
}

std::vector<std::string> station_site_names() {
  std::vector<std::string> out;
  for (const auto& s : kSites) out.emplace_back(s.name);
  return out;
}

CorrectionSet compute_corrections(const ReferenceStation& station, const ObservationEpoch& obs,
                                  const BroadcastEphemeris& eph) {
  station.validate();
  if (obs.observations.size() < 4) {
    throw Error(ErrorCode::StationClock,
                "cannot separate station clock: station observed " +
                    std::to_string(obs.observations.size()) + " satellites (need 4)");
  }
  std::vector<std::pair<int, double>> raw;
  raw.reserve(obs.observations.size());
  for (const auto& o : obs.observations) {
    const SatelliteState sat = eph.state(o.code.sat.svn, obs.epoch);
    const double expected = true_range(sat.position, station.surveyed_position) +
                            kSpeedOfLight * sat.clock_bias;
    raw.emplace_back(o.code.sat.svn, expected - o.code.pr_l1);
  }
  std::vector<double> sorted;
  for (const auto& [svn, d] : raw) sorted.push_back(d);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double clock = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  CorrectionSet out;
  out.epoch = obs.epoch;
  out.station = station.id;
  out.station_clock = clock;
  for (const auto& [svn, d] : raw) out.prc[svn] = d - clock;
  return out;
}

CorrectedEpoch apply_corrections(const ObservationEpoch& rover, const CorrectionSet& corr,
                                 double staleness_window) {
  const double age = rover.epoch.t - corr.epoch.t;
  if (!(std::abs(age) <= staleness_window)) {
    std::ostringstream msg;
    msg << "stale corrections: age " << age << " s exceeds window " << staleness_window << " s";
    throw Error(ErrorCode::StaleCorrections, msg.str());
  }
  CorrectedEpoch out;
  out.epoch.epoch = rover.epoch;
  out.epoch.receiver_truth = rover.receiver_truth;
  for (const auto& o : rover.observations) {
    auto it = corr.prc.find(o.code.sat.svn);
    if (it == corr.prc.end()) {
      ++out.dropped;
      continue;
    }
    SatelliteObservation c = o;
    c.code.pr_l1 += it->second;
    c.code.pr_l2 += it->second;
    out.epoch.observations.push_back(c);
  }
  if (out.epoch.observations.empty()) {
    throw Error(ErrorCode::NoMatchedSatellites, "no rover satellite has a correction");
  }
  return out;
}

std::vector<RangeObservation> range_observations(const ObservationEpoch& obs,
                                                 const BroadcastEphemeris& eph, RangeMode mode) {
  const std::size_t n = obs.observations.size();
  std::vector<double> pr(n);
  if (mode == RangeMode::L1) {
    for (std::size_t i = 0; i < n; ++i) pr[i] = obs.observations[i].code.pr_l1;
  } else {
    std::vector<double> l1(n), l2(n);
    for (std::size_t i = 0; i < n; ++i) {
      l1[i] = obs.observations[i].code.pr_l1;
      l2[i] = obs.observations[i].code.pr_l2;
    }
    // Same arithmetic as iono_free_pseudorange: l1 - k (l2 - l1).
    std::vector<double> diff(n);
    kernels::active().combine(l2, l1, 1.0, diff);
    kernels::active().combine(l1, diff, constants::kIonoFreeDifferenceWeight, pr);
  }
  std::vector<RangeObservation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({eph.state(obs.observations[i].code.sat.svn, obs.epoch), pr[i], 0.0});
  }
  return out;
}

CorrectedSolution solve_corrected(const ObservationEpoch& rover, const CorrectionSet& corr,
                                  const BroadcastEphemeris& eph, const SolverOptions& options,
                                  double staleness_window) {
  const CorrectedEpoch corrected = apply_corrections(rover, corr, staleness_window);
  const auto obs = range_observations(corrected.epoch, eph, RangeMode::L1);
  CorrectedSolution out;
  out.epoch = rover.epoch;
  out.solution = solve_pvt(obs, {}, options);
  out.station = corr.station;
  out.correction_epoch = corr.epoch;
  out.dropped = corrected.dropped;
  return out;
}

CorrectedSolutionLog real_time_dgps(std::span<const ObservationEpoch> rover_log,
                                    std::span<const ObservationEpoch> ref_log,
                                    const ReferenceStation& station, const BroadcastEphemeris& eph,
                                    const SolverOptions& options, double staleness_window) {
  CorrectedSolutionLog log;
  std::optional<CorrectionSet> latest;
  std::size_t next_ref = 0;
  for (const auto& rover : rover_log) {
    while (next_ref < ref_log.size() && ref_log[next_ref].epoch <= rover.epoch) {
      try {
        latest = compute_corrections(station, ref_log[next_ref], eph);
      } catch (const Error&) {
        // keep the previous set; staleness decides whether it is still usable
      }
      ++next_ref;
    }
    if (!latest) {
      log.skipped.push_back(rover.epoch);
      log.skip_reasons.emplace_back("no corrections received yet");
      continue;
    }
    try {
      auto sol = solve_corrected(rover, *latest, eph, options, staleness_window);
      if (!log.entries.empty() && !(log.entries.back().epoch < sol.epoch)) {
        throw Error(ErrorCode::InvalidArgument, "rover epochs must be strictly increasing");
      }
      log.entries.push_back(std::move(sol));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw;
      log.skipped.push_back(rover.epoch);
      log.skip_reasons.emplace_back(e.what());
    }
  }
  return log;
}

CorrectedSolutionLog post_process(std::span<const ObservationEpoch> rover_log,
                                  std::span<const ObservationEpoch> ref_log,
                                  const ReferenceStation& station, const BroadcastEphemeris& eph,
                                  const SolverOptions& options) {
  CorrectedSolutionLog log;
  for (const auto& rover : rover_log) {
    auto ref = std::find_if(ref_log.begin(), ref_log.end(),
                            [&](const ObservationEpoch& r) { return r.epoch.t == rover.epoch.t; });
    if (ref == ref_log.end()) {
      log.skipped.push_back(rover.epoch);
      log.skip_reasons.emplace_back("no reference epoch");
      continue;
    }
    try {
      const CorrectionSet corr = compute_corrections(station, *ref, eph);
      auto sol = solve_corrected(rover, corr, eph, options, kDefaultStalenessWindow);
      if (!log.entries.empty() && !(log.entries.back().epoch < sol.epoch)) {
        throw Error(ErrorCode::InvalidArgument, "rover epochs must be strictly increasing");
      }
      log.entries.push_back(std::move(sol));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw;
      log.skipped.push_back(rover.epoch);
      log.skip_reasons.emplace_back(e.what());
    }
  }
  return log;
}

std::vector<InvertedFix> inverted_dgps(std::span<const FleetReport> reports,
                                       const CorrectionSet& corr) {
  std::vector<InvertedFix> out;
  out.reserve(reports.size());
  for (const auto& r : reports) {
    if (r.satellites.size() != r.fix.svns.size()) {
      throw Error(ErrorCode::InvalidArgument, "report " + r.rover_id + " satellite list mismatch");
    }
    const auto n = static_cast<Eigen::Index>(r.satellites.size());
    std::vector<EcefPosition> sats;
    Eigen::VectorXd prc(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int svn = r.fix.svns[static_cast<std::size_t>(i)];
      auto it = corr.prc.find(svn);
      if (it == corr.prc.end()) {
        throw Error(ErrorCode::UnknownSatellite,
                    "report " + r.rover_id + " uses svn " + std::to_string(svn) +
                        " which has no correction");
      }
      prc(i) = it->second;
      sats.push_back(r.satellites[static_cast<std::size_t>(i)].position);
    }
    const GeometryMatrix g = geometry_matrix(sats, r.fix.position);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(g.transpose() * g);
    lu.setThreshold(1e-10);
    if (lu.rank() < 4) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry in report " + r.rover_id);
    const Eigen::Vector4d delta = lu.solve(g.transpose() * prc);
    InvertedFix fix;
    fix.rover_id = r.rover_id;
    fix.epoch = r.epoch;
    fix.position = EcefPosition::from(r.fix.position.vec() + delta.head<3>());
    // The fourth unknown is -c * d_r.
    fix.clock_bias = r.fix.clock_bias - delta(3) / kSpeedOfLight;
    out.push_back(fix);
  }
  return out;
}

}  // namespace gnsslab
