#pragma once

#include <Eigen/Core>

namespace gnsslab {

/// Earth-centered Earth-fixed Cartesian position, meters.
struct EcefPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  double norm() const { return vec().norm(); }
  static EcefPosition from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  friend bool operator==(const EcefPosition&, const EcefPosition&) = default;
};

/// Latitude/longitude in radians, altitude in meters above the spherical Earth.
struct GeodeticPosition {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;
};

/// Seconds from scenario start. Negative values are allowed.
struct Epoch {
  double t = 0.0;

  friend auto operator<=>(const Epoch&, const Epoch&) = default;
};

EcefPosition geodetic_to_ecef(const GeodeticPosition& g);

/// Throws Error(UndefinedDirection) for the zero vector. At the poles the
/// longitude is reported as 0.
GeodeticPosition ecef_to_geodetic(const EcefPosition& p);

/// Rotates an inertial vector into the Earth-fixed frame at time t. The two
/// frames coincide at t = 0.
EcefPosition inertial_to_ecef(const EcefPosition& p_inertial, Epoch t);

/// Rows are the local east, north and up unit vectors at the given point.
Eigen::Matrix3d enu_rotation(const GeodeticPosition& g);

}  // namespace gnsslab
