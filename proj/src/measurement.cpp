#include "gnsslab/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"

namespace gnsslab {

using namespace constants;

SatelliteState BroadcastEphemeris::state(int svn, Epoch t) const {
  const OrbitalElements& el = constellation_.at(svn);
  auto it = clock_bias_.find(svn);
  return {el.id, propagate(el, t), it == clock_bias_.end() ? 0.0 : it->second};
}

void ErrorBudget::validate() const {
  if (code_noise_sigma < 0.0 || phase_noise_sigma < 0.0 || sa_sigma < 0.0 ||
      multipath_amplitude < 0.0) {
    throw Error(ErrorCode::Range, "error budget sigmas and amplitudes must be >= 0");
  }
  if (iono.a < 0.0) throw Error(ErrorCode::Range, "ionosphere parameter must be >= 0");
  if (tropo.zenith_dry < 0.0 || tropo.zenith_wet < 0.0) {
    throw Error(ErrorCode::Range, "tropospheric zenith delays must be >= 0");
  }
}

double true_range(const EcefPosition& sat, const EcefPosition& rcvr) {
  const double r = (sat.vec() - rcvr.vec()).norm();
  if (r == 0.0) throw Error(ErrorCode::CoincidentPoints, "satellite coincides with receiver");
  return r;
}

double multipath_bias(double amplitude, double elevation) {
  return amplitude * std::exp(-elevation / deg2rad(10.0));
}

namespace {

struct CommonTerms {
  double range = 0.0;
  double clock = 0.0;  // c (d_s - d_r) including clock dither
  double tropo = 0.0;
  double multipath = 0.0;
  double iono_l1 = 0.0;
  double iono_l2 = 0.0;
};

CommonTerms common_terms(const SatelliteState& sat, const ReceiverState& rcvr,
                         const LookAngles& look, const ErrorBudget& budget,
                         const NoiseStreams& streams, Epoch t) {
  if (!(look.elevation > 0.0)) {
    throw Error(ErrorCode::BelowHorizon, "satellite " + sat.id.name() + " is below the horizon");
  }
  CommonTerms terms;
  terms.range = true_range(sat.position, rcvr.position);
  terms.clock = kSpeedOfLight * (sat.clock_bias - rcvr.clock_bias);
  if (budget.sa_sigma > 0.0) {
    auto s = streams.common_stream(sat.id.svn, t.t, Draw::SelectiveAvailability);
    terms.clock += budget.sa_sigma * standard_normal(s);
  }
  if (budget.tropo_enabled) terms.tropo = tropo_delay(budget.tropo, look.elevation).total();
  terms.multipath = multipath_bias(budget.multipath_amplitude, look.elevation);
  if (budget.iono_enabled) {
    terms.iono_l1 = iono_delay(budget.iono, kFrequencyL1);
    terms.iono_l2 = iono_delay(budget.iono, kFrequencyL2);
  }
  return terms;
}

double gaussian(const NoiseStreams& streams, int svn, Epoch t, Draw draw, double sigma) {
  if (sigma == 0.0) return 0.0;
  auto s = streams.receiver_stream(svn, t.t, draw);
  return sigma * standard_normal(s);
}

std::int64_t draw_ambiguity(const NoiseStreams& streams, int svn, Draw draw) {
  auto s = streams.pass_stream(svn, draw);
  return uniform_int(s, -kAmbiguitySpan, kAmbiguitySpan);
}

}  // namespace

PseudorangeObservation simulate_pseudorange(const SatelliteState& sat, const ReceiverState& rcvr,
                                            const LookAngles& look, const ErrorBudget& budget,
                                            const NoiseStreams& streams, Epoch t) {
  const CommonTerms k = common_terms(sat, rcvr, look, budget, streams, t);
  const double base = k.range + k.clock + k.tropo + k.multipath;
  PseudorangeObservation obs;
  obs.sat = sat.id;
  obs.epoch = t;
  obs.pr_l1 = base + k.iono_l1 +
              gaussian(streams, sat.id.svn, t, Draw::CodeNoiseL1, budget.code_noise_sigma);
  obs.pr_l2 = base + k.iono_l2 +
              gaussian(streams, sat.id.svn, t, Draw::CodeNoiseL2, budget.code_noise_sigma);
  return obs;
}

CarrierPhaseObservation simulate_carrier_phase(const SatelliteState& sat,
                                               const ReceiverState& rcvr, const LookAngles& look,
                                               const ErrorBudget& budget,
                                               const NoiseStreams& streams, Epoch t) {
  const CommonTerms k = common_terms(sat, rcvr, look, budget, streams, t);
  const double base = k.range + k.clock + k.tropo + k.multipath;
  CarrierPhaseObservation obs;
  obs.sat = sat.id;
  obs.epoch = t;
  obs.ambiguity_l1 = draw_ambiguity(streams, sat.id.svn, Draw::AmbiguityL1);
  obs.ambiguity_l2 = draw_ambiguity(streams, sat.id.svn, Draw::AmbiguityL2);
  // The ionosphere advances the carrier by the same amount it delays the code.
  obs.phase_l1 = (base - k.iono_l1) / kWavelengthL1 + static_cast<double>(*obs.ambiguity_l1) +
                 gaussian(streams, sat.id.svn, t, Draw::PhaseNoiseL1, budget.phase_noise_sigma);
  obs.phase_l2 = (base - k.iono_l2) / kWavelengthL2 + static_cast<double>(*obs.ambiguity_l2) +
                 gaussian(streams, sat.id.svn, t, Draw::PhaseNoiseL2, budget.phase_noise_sigma);
  return obs;
}

ObservationEpoch simulate_epoch(const BroadcastEphemeris& eph, const ReceiverState& rcvr, Epoch t,
                                double mask, const ErrorBudget& budget) {
  budget.validate();
  const NoiseStreams streams = budget.streams();
  const GeodeticPosition observer = ecef_to_geodetic(rcvr.position);

  ObservationEpoch out;
  out.epoch = t;
  out.receiver_truth = rcvr;
  for (const auto& el : eph.constellation().satellites()) {
    SatelliteState sat = eph.state(el.id.svn, t);
    if (auto it = budget.ephemeris_error.find(el.id.svn); it != budget.ephemeris_error.end()) {
      sat.position = EcefPosition::from(sat.position.vec() + it->second);
    }
    const LookAngles look = look_angles(observer, sat.position);
    if (look.elevation < mask || !(look.elevation > 0.0)) continue;
    out.observations.push_back({simulate_pseudorange(sat, rcvr, look, budget, streams, t),
                                simulate_carrier_phase(sat, rcvr, look, budget, streams, t),
                                look});
  }
  std::stable_sort(out.observations.begin(), out.observations.end(),
                   [](const SatelliteObservation& a, const SatelliteObservation& b) {
                     return a.look.elevation > b.look.elevation;
                   });
  return out;
}

}  // namespace gnsslab
