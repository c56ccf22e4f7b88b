// Command-line front end. Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gnsslab/carrier_phase.hpp"
#include "gnsslab/constants.hpp"
#include "gnsslab/dgps.hpp"
#include "gnsslab/error.hpp"
#include "gnsslab/formats.hpp"
#include "gnsslab/scenario.hpp"

namespace fs = std::filesystem;
using namespace gnsslab;
using constants::deg2rad;
using constants::rad2deg;
using formats::fixed;
using formats::quantize;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitFailure = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

std::vector<ObservationEpoch> load_log(const std::string& path, const Constellation& c) {
  return formats::to_epochs(formats::parse_observation_log(read_file(path)), c);
}

bool is_validation(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Parse:
    case ErrorCode::Range:
    case ErrorCode::UnknownSatellite:
      return true;
    default:
      return false;
  }
}

nlohmann::ordered_json error_record(Epoch t, const std::exception& e) {
  nlohmann::ordered_json j;
  j["epoch_s"] = quantize(t.t, formats::kMeterDigits);
  j["error"] = e.what();
  return j;
}

struct Options {
  double epoch = 0.0;
  int svn_base = 1;
  double lat = 0.0, lon = 0.0, alt = 0.0, mask = 15.0;
  std::string scenario, out, role = "rover", obs, mode = "spp";
  bool model_tropo = false;
  std::string ref, ref_pos, ref_site, rover, corrections_out;
  bool post = false, inverted = false;
  double staleness = kDefaultStalenessWindow;
  int radius = 3, max_sats = 8;
  unsigned threads = 0;
  double pr_l1 = 0.0, pr_l2 = 0.0;
  double grid = 10.0;
  int trials = 100;
  std::string out_dir;
};

int cmd_constellation_dump(const Options& o) {
  const Constellation c = build_nominal_constellation(o.svn_base);
  std::string out = "svn,plane,slot,x_m,y_m,z_m\n";
  for (const auto& el : c.satellites()) {
    const EcefPosition p = propagate(el, Epoch{o.epoch});
    out += std::to_string(el.id.svn) + ',' + el.id.plane + ',' + std::to_string(el.id.slot) + ',' +
           fixed(p.x, formats::kMeterDigits) + ',' + fixed(p.y, formats::kMeterDigits) + ',' +
           fixed(p.z, formats::kMeterDigits) + '\n';
  }
  write_output(o.out, out);
  return 0;
}

int cmd_visible(const Options& o) {
  if (std::abs(o.lat) > 90.0 || std::abs(o.lon) > 180.0) {
    throw Error(ErrorCode::Range, "latitude/longitude out of range");
  }
  const Constellation c = build_nominal_constellation(o.svn_base);
  const auto vis = visible_satellites(c, {deg2rad(o.lat), deg2rad(o.lon), o.alt}, deg2rad(o.mask),
                                      Epoch{o.epoch});
  std::string out = "svn,name,elev_deg,azim_deg,range_m\n";
  for (const auto& v : vis) {
    out += std::to_string(v.id.svn) + ',' + v.id.name() + ',' +
           fixed(rad2deg(v.look.elevation), formats::kDegreeDigits) + ',' +
           fixed(rad2deg(v.look.azimuth), formats::kDegreeDigits) + ',' +
           fixed(v.look.range, formats::kMeterDigits) + '\n';
  }
  write_output(o.out, out);
  return 0;
}

int cmd_simulate(const Options& o) {
  const Scenario s = parse_scenario(read_file(o.scenario));
  if (o.role != "rover" && o.role != "station") {
    throw Error(ErrorCode::InvalidArgument, "role must be rover or station");
  }
  const auto log = simulate_observations(s, o.role == "rover" ? Role::Rover : Role::Station);
  write_output(o.out, formats::write_observation_log(log));
  return 0;
}

int cmd_solve(const Options& o) {
  const auto mode = parse_solver_mode(o.mode);
  if (!mode) throw Error(ErrorCode::InvalidArgument, "mode must be spp, iono-free or altitude-aided");
  const BroadcastEphemeris eph(build_nominal_constellation(o.svn_base));
  const auto log = load_log(o.obs, eph.constellation());
  Scenario s;
  s.mode = *mode;
  s.altitude = o.alt;
  s.model_troposphere = o.model_tropo;
  std::string out;
  int solved = 0;
  for (const auto& epoch : log) {
    try {
      auto obs = range_observations(epoch, eph, *mode == SolverMode::IonoFree ? RangeMode::IonoFree
                                                                              : RangeMode::L1);
      if (o.model_tropo) {
        for (std::size_t i = 0; i < obs.size(); ++i) {
          obs[i].modeled_delay =
              tropo_delay(TroposphereModel{}, epoch.observations[i].look.elevation).total();
        }
      }
      const PvtSolution sol = *mode == SolverMode::AltitudeAided ? solve_altitude_aided(obs, o.alt)
                                                                 : solve_pvt(obs);
      out += formats::dump_line(formats::solution_record(epoch.epoch, sol));
      ++solved;
    } catch (const Error& e) {
      out += formats::dump_line(error_record(epoch.epoch, e));
    }
  }
  write_output(o.out, out);
  return solved > 0 || log.empty() ? 0 : kExitFailure;
}

GeodeticPosition parse_ref_position(const Options& o) {
  if (!o.ref_site.empty()) {
    auto site = station_site(o.ref_site);
    if (!site) throw Error(ErrorCode::InvalidArgument, "unknown site '" + o.ref_site + "'");
    return *site;
  }
  std::vector<double> v;
  std::stringstream ss(o.ref_pos);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(formats::parse_double(tok));
  if (v.size() != 3) throw Error(ErrorCode::Parse, "--ref-pos expects lat_deg,lon_deg,alt_m");
  if (std::abs(v[0]) > 90.0 || std::abs(v[1]) > 180.0) {
    throw Error(ErrorCode::Range, "--ref-pos out of range");
  }
  return {deg2rad(v[0]), deg2rad(v[1]), v[2]};
}

int cmd_dgps(const Options& o) {
  const BroadcastEphemeris eph(build_nominal_constellation(o.svn_base));
  const ReferenceStation station{o.ref_site.empty() ? "custom" : o.ref_site,
                                 geodetic_to_ecef(parse_ref_position(o))};
  station.validate();
  const auto ref_log = load_log(o.ref, eph.constellation());
  const auto rover_log = load_log(o.rover, eph.constellation());

  if (!o.corrections_out.empty()) {
    std::vector<CorrectionSet> sets;
    for (const auto& e : ref_log) sets.push_back(compute_corrections(station, e, eph));
    write_output(o.corrections_out, formats::write_corrections(sets));
  }

  std::string out;
  if (o.inverted) {
    std::map<double, CorrectionSet> by_epoch;
    for (const auto& e : ref_log) {
      try {
        by_epoch.emplace(e.epoch.t, compute_corrections(station, e, eph));
      } catch (const Error&) {
        // epoch without corrections
      }
    }
    for (const auto& epoch : rover_log) {
      try {
        auto it = by_epoch.find(epoch.epoch.t);
        if (it == by_epoch.end()) throw Error(ErrorCode::StaleCorrections, "no correction set for epoch");
        const auto obs = range_observations(epoch, eph);
        FleetReport report{"rover", epoch.epoch, solve_pvt(obs), {}};
        for (const auto& r : obs) report.satellites.push_back(r.sat);
        const auto fixes = inverted_dgps(std::span<const FleetReport>(&report, 1), it->second);
        PvtSolution sol = report.fix;
        sol.position = fixes.front().position;
        sol.clock_bias = fixes.front().clock_bias;
        out += formats::dump_line(formats::solution_record(epoch.epoch, sol));
      } catch (const Error& e) {
        out += formats::dump_line(error_record(epoch.epoch, e));
      }
    }
  } else {
    const auto log = o.post ? post_process(rover_log, ref_log, station, eph)
                            : real_time_dgps(rover_log, ref_log, station, eph, {}, o.staleness);
    std::size_t next_entry = 0, next_skip = 0;
    for (const auto& epoch : rover_log) {
      if (next_entry < log.entries.size() && log.entries[next_entry].epoch == epoch.epoch) {
        const auto& entry = log.entries[next_entry++];
        auto j = formats::solution_record(entry.epoch, entry.solution);
        j["station"] = entry.station;
        j["correction_epoch_s"] = quantize(entry.correction_epoch.t, formats::kMeterDigits);
        j["dropped"] = entry.dropped;
        out += formats::dump_line(j);
      } else if (next_skip < log.skipped.size() && log.skipped[next_skip] == epoch.epoch) {
        out += formats::dump_line(
            error_record(epoch.epoch, Error(ErrorCode::StaleCorrections, log.skip_reasons[next_skip])));
        ++next_skip;
      }
    }
  }
  write_output(o.out, out);
  return 0;
}

int cmd_ambiguity(const Options& o) {
  if (o.radius < 0) throw Error(ErrorCode::Range, "radius must be >= 0");
  if (o.max_sats < 5) throw Error(ErrorCode::Range, "max-sats must be >= 5");
  const BroadcastEphemeris eph(build_nominal_constellation(o.svn_base));
  const auto log = load_log(o.obs, eph.constellation());
  AmbiguitySearchOptions search;
  search.radius = o.radius;
  search.threads = o.threads;
  std::string out;
  for (const auto& epoch : log) {
    try {
      // Observations arrive in descending elevation; keep the highest.
      ObservationEpoch used = epoch;
      if (used.observations.size() > static_cast<std::size_t>(o.max_sats)) {
        used.observations.resize(static_cast<std::size_t>(o.max_sats));
      }
      const auto obs = range_observations(used, eph);
      const PvtSolution code = solve_pvt(obs);
      std::vector<PhaseObservation> phase;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        phase.push_back({obs[i].sat, used.observations[i].phase.phase_l1});
      }
      const AmbiguitySet floats = float_ambiguities(code, phase);
      const AmbiguitySet fixed_set = resolve_integers(floats, phase, code, search);
      const PvtSolution refined = phase_position(phase, fixed_set, code);
      auto j = formats::solution_record(epoch.epoch, refined);
      j["ratio"] = quantize(fixed_set.ratio, formats::kMeterDigits);
      j["candidates"] = fixed_set.candidates;
      nlohmann::ordered_json amb = nlohmann::ordered_json::array();
      for (const auto& e : fixed_set.entries) {
        nlohmann::ordered_json a;
        a["svn"] = e.svn;
        a["float_cyc"] = quantize(e.float_estimate, formats::kCycleDigits);
        a["integer_cyc"] = e.resolved;
        amb.push_back(a);
      }
      j["ambiguities"] = amb;
      out += formats::dump_line(j);
    } catch (const Error& e) {
      out += formats::dump_line(error_record(epoch.epoch, e));
    }
  }
  write_output(o.out, out);
  return 0;
}

int cmd_ionofree(const Options& o) {
  const IonoFreeRange r = iono_free_pseudorange(o.pr_l1, o.pr_l2);
  nlohmann::ordered_json j;
  j["literal_m"] = quantize(r.literal, formats::kMeterDigits);
  j["normalized_m"] = quantize(r.normalized, formats::kMeterDigits);
  write_output(o.out, formats::dump_line(j));
  return 0;
}

int cmd_dop_map(const Options& o) {
  const Scenario s = parse_scenario(read_file(o.scenario));
  write_output(o.out, write_dop_map(dop_map(s, o.grid)));
  return 0;
}

nlohmann::ordered_json summary_object(const RunSummary& s) {
  return nlohmann::ordered_json::parse(summary_json(s));
}

int cmd_montecarlo(const Options& o) {
  const Scenario s = parse_scenario(read_file(o.scenario));
  const MonteCarloSummary mc = run_monte_carlo(s, o.trials, o.threads);
  nlohmann::ordered_json j;
  j["trials"] = mc.trials;
  j["seed"] = s.seed;
  j["aggregate"] = summary_object(mc.aggregate);
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& t : mc.per_trial) per.push_back(summary_object(t));
  j["per_trial"] = per;
  write_output(o.out, formats::dump_line(j));
  return 0;
}

int cmd_run(const Options& o) {
  const Scenario s = parse_scenario(read_file(o.scenario));
  const RunReport r = run_scenario(s);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  write_output((dir / "scenario.txt").string(), r.config);
  write_output((dir / "observations.csv").string(), r.observations_csv);
  write_output((dir / "solutions.jsonl").string(), r.solutions_jsonl);
  write_output((dir / "summary.json").string(), r.summary_json + '\n');
  if (s.dgps) {
    write_output((dir / "station_observations.csv").string(), r.station_observations_csv);
    write_output((dir / "corrections.csv").string(), r.corrections_csv);
  }
  std::cout << r.summary_json << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnsslab: closed-loop GNSS positioning lab"};
  app.require_subcommand(1);
  Options o;
  std::function<int(const Options&)> handler;
  auto bind = [&](CLI::App* sub, int (*fn)(const Options&)) {
    sub->callback([&handler, fn] { handler = fn; });
  };

  auto* cons = app.add_subcommand("constellation", "Nominal constellation queries");
  cons->require_subcommand(1);
  auto* dump = cons->add_subcommand("dump", "Satellite ECEF positions as CSV");
  dump->add_option("--epoch", o.epoch, "Epoch, s")->required();
  dump->add_option("--svn-base", o.svn_base, "First SVN");
  dump->add_option("--out", o.out, "Output file (default stdout)");
  bind(dump, cmd_constellation_dump);

  auto* vis = app.add_subcommand("visible", "Satellites above the mask at a site");
  vis->add_option("--lat", o.lat, "Latitude, deg")->required();
  vis->add_option("--lon", o.lon, "Longitude, deg")->required();
  vis->add_option("--alt", o.alt, "Altitude, m");
  vis->add_option("--epoch", o.epoch, "Epoch, s");
  vis->add_option("--mask", o.mask, "Elevation mask, deg")->check(CLI::Range(0.0, 89.999999));
  vis->add_option("--svn-base", o.svn_base, "First SVN");
  vis->add_option("--out", o.out, "Output file");
  bind(vis, cmd_visible);

  auto* sim = app.add_subcommand("simulate", "Write an observation log for a scenario");
  sim->add_option("--scenario", o.scenario, "Scenario file")->required();
  sim->add_option("--role", o.role, "rover or station")->check(CLI::IsMember({"rover", "station"}));
  sim->add_option("--out", o.out, "Output file");
  bind(sim, cmd_simulate);

  auto* solve = app.add_subcommand("solve", "Solve every epoch of an observation log");
  solve->add_option("--obs", o.obs, "Observation log CSV")->required();
  solve->add_option("--mode", o.mode, "spp, iono-free or altitude-aided")
      ->check(CLI::IsMember({"spp", "iono-free", "altitude-aided"}));
  solve->add_option("--alt", o.alt, "Known altitude for altitude-aided, m");
  solve->add_flag("--model-troposphere", o.model_tropo, "Subtract the default troposphere model");
  solve->add_option("--svn-base", o.svn_base, "First SVN");
  solve->add_option("--out", o.out, "Output file");
  bind(solve, cmd_solve);

  auto* dg = app.add_subcommand("dgps", "Differential corrections from a reference log");
  dg->add_option("--ref", o.ref, "Reference station log")->required();
  auto* pos = dg->add_option("--ref-pos", o.ref_pos, "Surveyed lat_deg,lon_deg,alt_m");
  auto* site = dg->add_option("--ref-site", o.ref_site, "Preset site name");
  pos->excludes(site);
  dg->add_option("--rover", o.rover, "Rover log")->required();
  dg->add_flag("--post-process", o.post, "Match epochs exactly after the fact");
  dg->add_flag("--inverted", o.inverted, "Correct finished rover fixes centrally");
  dg->add_option("--corrections-out", o.corrections_out, "Write the correction stream");
  dg->add_option("--staleness", o.staleness, "Real-time staleness window, s");
  dg->add_option("--svn-base", o.svn_base, "First SVN");
  dg->add_option("--out", o.out, "Output file");
  bind(dg, cmd_dgps);

  auto* amb = app.add_subcommand("ambiguity", "Resolve L1 carrier-phase integers per epoch");
  amb->add_option("--obs", o.obs, "Observation log CSV")->required();
  amb->add_option("--radius", o.radius, "Search radius, cycles");
  amb->add_option("--max-sats", o.max_sats, "Use at most this many satellites");
  amb->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  amb->add_option("--svn-base", o.svn_base, "First SVN");
  amb->add_option("--out", o.out, "Output file");
  bind(amb, cmd_ambiguity);

  auto* ifree = app.add_subcommand("ionofree", "Ionosphere-free pseudorange combination");
  ifree->add_option("--pr-l1", o.pr_l1, "L1 pseudorange, m")->required();
  ifree->add_option("--pr-l2", o.pr_l2, "L2 pseudorange, m")->required();
  bind(ifree, cmd_ionofree);

  auto* dmap = app.add_subcommand("dop-map", "Visibility and DOP over a lat/lon grid");
  dmap->add_option("--scenario", o.scenario, "Scenario file")->required();
  dmap->add_option("--grid", o.grid, "Grid spacing, deg");
  dmap->add_option("--out", o.out, "Output file");
  bind(dmap, cmd_dop_map);

  auto* mc = app.add_subcommand("montecarlo", "Repeat a scenario over consecutive seeds");
  mc->add_option("--scenario", o.scenario, "Scenario file")->required();
  mc->add_option("--trials", o.trials, "Number of trials");
  mc->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  mc->add_option("--out", o.out, "Output file");
  bind(mc, cmd_montecarlo);

  auto* run = app.add_subcommand("run", "Run a scenario and write every artifact");
  run->add_option("--scenario", o.scenario, "Scenario file")->required();
  run->add_option("--out-dir", o.out_dir, "Artifact directory")->required();
  bind(run, cmd_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  if (dg->parsed() && o.ref_pos.empty() && o.ref_site.empty()) {
    std::cerr << "dgps: one of --ref-pos or --ref-site is required\n";
    return kExitInvalid;
  }
  try {
    return handler(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation(e.code()) ? kExitInvalid : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
