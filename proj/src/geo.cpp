#include "gnsslab/geo.hpp"

#include <cmath>
#include <numbers>

#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"

namespace gnsslab {

using constants::kEarthRadius;

EcefPosition geodetic_to_ecef(const GeodeticPosition& g) {
  const double r = kEarthRadius + g.altitude;
  const double cos_lat = std::cos(g.latitude);
  return {r * cos_lat * std::cos(g.longitude), r * cos_lat * std::sin(g.longitude),
          r * std::sin(g.latitude)};
}

GeodeticPosition ecef_to_geodetic(const EcefPosition& p) {
  const double horizontal = std::hypot(p.x, p.y);
  const double r = std::hypot(horizontal, p.z);
  if (r == 0.0) throw Error(ErrorCode::UndefinedDirection, "undefined direction: zero vector");
  GeodeticPosition g;
  g.latitude = std::atan2(p.z, horizontal);
  g.longitude = horizontal == 0.0 ? 0.0 : std::atan2(p.y, p.x);
  // atan2 returns -pi for (-x, -0); keep longitude in (-pi, pi].
  if (g.longitude <= -std::numbers::pi) g.longitude += 2.0 * std::numbers::pi;
  g.altitude = r - kEarthRadius;
  return g;
}

EcefPosition inertial_to_ecef(const EcefPosition& p, Epoch t) {
  const double theta = constants::kEarthRotationRate * t.t;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * p.x + s * p.y, -s * p.x + c * p.y, p.z};
}

Eigen::Matrix3d enu_rotation(const GeodeticPosition& g) {
  const double sl = std::sin(g.latitude), cl = std::cos(g.latitude);
  const double so = std::sin(g.longitude), co = std::cos(g.longitude);
  Eigen::Matrix3d r;
  r << -so, co, 0.0,
       -sl * co, -sl * so, cl,
       cl * co, cl * so, sl;
  return r;
}

}  // namespace gnsslab
