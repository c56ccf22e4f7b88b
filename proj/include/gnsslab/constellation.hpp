#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnsslab/geo.hpp"

namespace gnsslab {

/// Plane letter A-F, slot 1-4, and the NAVSTAR space vehicle number.
struct SatelliteId {
  char plane = 'A';
  int slot = 1;
  int svn = 1;

  std::string name() const { return std::string(1, plane) + std::to_string(slot); }
  friend bool operator==(const SatelliteId&, const SatelliteId&) = default;
};

/// Circular orbit. Angles in radians, radius in meters, period in seconds.
struct OrbitalElements {
  SatelliteId id;
  double radius = 0.0;
  double inclination = 0.0;
  double raan = 0.0;
  double phase_at_epoch = 0.0;
  double period = 0.0;
};

struct LookAngles {
  double elevation = 0.0;  // rad
  double azimuth = 0.0;    // rad, [0, 2pi), clockwise from north
  double range = 0.0;      // m
};

struct VisibleSatellite {
  SatelliteId id;
  LookAngles look;
};

class Constellation {
 public:
  Constellation() = default;
  explicit Constellation(std::vector<OrbitalElements> satellites);

  const std::vector<OrbitalElements>& satellites() const { return satellites_; }
  std::size_t size() const { return satellites_.size(); }

  const OrbitalElements* find(int svn) const;
  const OrbitalElements& at(int svn) const;  // throws UnknownSatellite

 private:
  std::vector<OrbitalElements> satellites_;
};

/// In-plane phase offset added per plane index to the 90 degree slot spacing.
inline constexpr double kPlanePhaseOffsetDeg = 15.0;

/// Six planes A-F (RAAN 0, 60, ..., 300 deg) with four slots each. SVNs are
/// assigned in plane-major order starting at svn_base.
Constellation build_nominal_constellation(int svn_base = 1);

/// Satellite position in the inertial frame.
EcefPosition propagate_inertial(const OrbitalElements& el, Epoch t);

/// Satellite position in the Earth-fixed frame.
EcefPosition propagate(const OrbitalElements& el, Epoch t);

/// Throws Error(CoincidentPoints) when observer and satellite coincide.
LookAngles look_angles(const GeodeticPosition& observer, const EcefPosition& sat);

/// Satellites with elevation >= mask, sorted by descending elevation.
std::vector<VisibleSatellite> visible_satellites(const Constellation& c,
                                                 const GeodeticPosition& observer,
                                                 double mask, Epoch t);

}  // namespace gnsslab
