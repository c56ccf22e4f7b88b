#pragma once

// Shared fixtures and independent reference computations for the tests.

#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gnsslab/constants.hpp"
#include "gnsslab/constellation.hpp"
#include "gnsslab/measurement.hpp"
#include "gnsslab/rng.hpp"
#include "gnsslab/solver.hpp"

namespace testing {

using namespace gnsslab;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniformly distributed point on the sphere (area-weighted latitude).
inline GeodeticPosition random_surface(std::mt19937_64& rng, double altitude = 0.0) {
  const double lat = std::asin(uniform(rng, -1.0, 1.0));
  const double lon = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return {lat, lon, altitude};
}

/// Hand-written spherical-to-Cartesian conversion.
inline Eigen::Vector3d spherical_point(double lat, double lon, double radius) {
  return {radius * std::cos(lat) * std::cos(lon), radius * std::cos(lat) * std::sin(lon),
          radius * std::sin(lat)};
}

/// Exact pseudoranges under the model pr = rho + c (d_s - d_r).
inline std::vector<RangeObservation> exact_ranges(const BroadcastEphemeris& eph,
                                                  const ReceiverState& rcvr, Epoch t,
                                                  double mask = constants::deg2rad(15.0)) {
  std::vector<RangeObservation> out;
  const auto g = ecef_to_geodetic(rcvr.position);
  for (const auto& v : visible_satellites(eph.constellation(), g, mask, t)) {
    const SatelliteState s = eph.state(v.id.svn, t);
    const double rho = (s.position.vec() - rcvr.position.vec()).norm();
    out.push_back({s, rho + constants::kSpeedOfLight * (s.clock_bias - rcvr.clock_bias), 0.0});
  }
  return out;
}

/// Gauss-Jordan inversion with partial pivoting, independent of Eigen's solvers.
inline Eigen::MatrixXd gauss_jordan_inverse(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double p = a(col, col);
    a.row(col) /= p;
    inv.row(col) /= p;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

/// Receiver positions and epochs that the nominal constellation always covers.
struct Trial {
  ReceiverState truth;
  Epoch t;
};

inline Trial random_trial(std::mt19937_64& rng, double max_clock = 1e-3) {
  Trial tr;
  tr.truth.position = geodetic_to_ecef(random_surface(rng));
  tr.truth.clock_bias = uniform(rng, -max_clock, max_clock);
  tr.t = Epoch{uniform(rng, 0.0, constants::kOrbitPeriod)};
  return tr;
}

}  // namespace testing
