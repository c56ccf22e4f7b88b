#include "gnsslab/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"

namespace gnsslab {

using namespace constants;

Constellation::Constellation(std::vector<OrbitalElements> satellites)
    : satellites_(std::move(satellites)) {
  for (std::size_t i = 0; i < satellites_.size(); ++i) {
    const auto& s = satellites_[i];
    if (!(s.radius > kEarthRadius) || !(s.period > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "orbit " + s.id.name() + " has invalid radius/period");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (satellites_[j].id.svn == s.id.svn) {
        throw Error(ErrorCode::InvalidArgument, "duplicate svn " + std::to_string(s.id.svn));
      }
    }
  }
}

const OrbitalElements* Constellation::find(int svn) const {
  auto it = std::find_if(satellites_.begin(), satellites_.end(),
                         [svn](const OrbitalElements& e) { return e.id.svn == svn; });
  return it == satellites_.end() ? nullptr : &*it;
}

const OrbitalElements& Constellation::at(int svn) const {
  if (const auto* e = find(svn)) return *e;
  throw Error(ErrorCode::UnknownSatellite, "unknown svn " + std::to_string(svn));
}

Constellation build_nominal_constellation(int svn_base) {
  std::vector<OrbitalElements> sats;
  sats.reserve(kPlaneCount * kSlotsPerPlane);
  int svn = svn_base;
  for (int p = 0; p < kPlaneCount; ++p) {
    for (int s = 0; s < kSlotsPerPlane; ++s) {
      OrbitalElements e;
      e.id = {static_cast<char>('A' + p), s + 1, svn++};
      e.radius = kOrbitRadius;
      e.inclination = kInclination;
      e.raan = deg2rad(60.0 * p);
      e.phase_at_epoch = deg2rad(90.0 * s + kPlanePhaseOffsetDeg * p);
      e.period = kOrbitPeriod;
      sats.push_back(e);
    }
  }
  return Constellation(std::move(sats));
}

EcefPosition propagate_inertial(const OrbitalElements& el, Epoch t) {
  // Reduce the elapsed fraction of an orbit first so that t and t + period
  // land on the same argument of latitude.
  const double revs = t.t / el.period;
  const double frac = revs - std::floor(revs);
  const double u = el.phase_at_epoch + 2.0 * std::numbers::pi * frac;
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(el.raan), so = std::sin(el.raan);
  const double ci = std::cos(el.inclination), si = std::sin(el.inclination);
  return {el.radius * (co * cu - so * su * ci), el.radius * (so * cu + co * su * ci),
          el.radius * (su * si)};
}

EcefPosition propagate(const OrbitalElements& el, Epoch t) {
  return inertial_to_ecef(propagate_inertial(el, t), t);
}

LookAngles look_angles(const GeodeticPosition& observer, const EcefPosition& sat) {
  const Eigen::Vector3d d = sat.vec() - geodetic_to_ecef(observer).vec();
  const double range = d.norm();
  if (range == 0.0) throw Error(ErrorCode::CoincidentPoints, "satellite coincides with observer");
  const Eigen::Vector3d enu = enu_rotation(observer) * d;
  LookAngles look;
  look.range = range;
  look.elevation = std::asin(std::clamp(enu.z() / range, -1.0, 1.0));
  double az = std::atan2(enu.x(), enu.y());
  if (az < 0.0) az += 2.0 * std::numbers::pi;
  if (az >= 2.0 * std::numbers::pi) az = 0.0;
  look.azimuth = az;
  return look;
}

std::vector<VisibleSatellite> visible_satellites(const Constellation& c,
                                                 const GeodeticPosition& observer,
                                                 double mask, Epoch t) {
  if (!(mask >= 0.0 && mask < std::numbers::pi / 2)) {
    throw Error(ErrorCode::Range, "elevation mask must lie in [0, 90) degrees");
  }
  std::vector<VisibleSatellite> out;
  for (const auto& el : c.satellites()) {
    const LookAngles look = look_angles(observer, propagate(el, t));
    if (look.elevation >= mask) out.push_back({el.id, look});
  }
  std::stable_sort(out.begin(), out.end(), [](const VisibleSatellite& a, const VisibleSatellite& b) {
    return a.look.elevation > b.look.elevation;
  });
  return out;
}

}  // namespace gnsslab
