#include "gnsslab/solver.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "gnsslab/constants.hpp"
#include "gnsslab/kernels.hpp"

namespace gnsslab {

using constants::kEarthRadius;
using constants::kSpeedOfLight;

double PvtSolution::residual_rms() const {
  if (residuals.empty()) return 0.0;
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

// ---------------------------------------------------------------------------
// Trilateration

TrilaterationResult trilaterate_three_spheres(const std::array<EcefPosition, 3>& centers,
                                              const std::array<double, 3>& ranges) {
  const Eigen::Vector3d p1 = centers[0].vec(), p2 = centers[1].vec(), p3 = centers[2].vec();
  const double r1 = ranges[0], r2 = ranges[1], r3 = ranges[2];

  const double d = (p2 - p1).norm();
  const double scale = std::max(d, (p3 - p1).norm());
  if (d == 0.0 || scale == 0.0) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: coincident centers");
  const Eigen::Vector3d ex = (p2 - p1) / d;
  const double i = ex.dot(p3 - p1);
  const Eigen::Vector3d t = p3 - p1 - i * ex;
  if (t.norm() <= 1e-10 * scale) {
    throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: collinear centers");
  }
  const Eigen::Vector3d ey = t.normalized();
  const Eigen::Vector3d ez = ex.cross(ey);
  const double j = ey.dot(p3 - p1);

  const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * x;
  const double z2 = r1 * r1 - x * x - y * y;
  const Eigen::Vector3d base = p1 + x * ex + y * ey;

  if (z2 < 0.0) {
    std::array<double, 3> v{};
    const Eigen::Vector3d* ps[3] = {&p1, &p2, &p3};
    std::ostringstream msg;
    msg << "no solution: spheres do not intersect (violations";
    for (int k = 0; k < 3; ++k) {
      v[k] = std::abs((base - *ps[k]).norm() - ranges[k]);
      msg << ' ' << v[k];
    }
    msg << " m)";
    throw NoSolutionError(msg.str(), v);
  }
  const double z = std::sqrt(z2);

  // Newton polish on the three range equations; skipped near tangency where
  // the Jacobian loses rank.
  auto polish = [&](Eigen::Vector3d q) {
    if (z <= 1e-6 * scale) return q;
    for (int it = 0; it < 3; ++it) {
      Eigen::Matrix3d jac;
      Eigen::Vector3d f;
      const Eigen::Vector3d* ps[3] = {&p1, &p2, &p3};
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d diff = q - *ps[k];
        const double n = diff.norm();
        f[k] = n - ranges[k];
        jac.row(k) = diff.transpose() / n;
      }
      q -= jac.fullPivLu().solve(f);
    }
    return q;
  };
  return {EcefPosition::from(polish(base + z * ez)), EcefPosition::from(polish(base - z * ez))};
}

EcefPosition select_feasible(const TrilaterationResult& r) {
  const double da = std::abs(r.point_a.norm() - kEarthRadius);
  const double db = std::abs(r.point_b.norm() - kEarthRadius);
  if (std::abs(da - db) < 1.0) {
    throw Error(ErrorCode::AmbiguousSolution,
                "ambiguous: both candidates equally plausible, fourth measurement required");
  }
  return da < db ? r.point_a : r.point_b;
}

// ---------------------------------------------------------------------------
// Geometry and DOP

GeometryMatrix geometry_matrix(std::span<const EcefPosition> sats, const EcefPosition& rcvr) {
  GeometryMatrix g(static_cast<Eigen::Index>(sats.size()), 4);
  for (std::size_t i = 0; i < sats.size(); ++i) {
    const Eigen::Vector3d d = sats[i].vec() - rcvr.vec();
    const double n = d.norm();
    if (n == 0.0) throw Error(ErrorCode::CoincidentPoints, "satellite coincides with receiver");
    const auto row = static_cast<Eigen::Index>(i);
    g.block<1, 3>(row, 0) = -(d / n).transpose();
    g(row, 3) = 1.0;
  }
  return g;
}

DopValues dilution_of_precision(const GeometryMatrix& g, const EcefPosition& receiver) {
  const Eigen::Matrix4d n = g.transpose() * g;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(n);
  lu.setThreshold(1e-10);
  if (g.rows() < 4 || lu.rank() < 4) {
    throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: singular G^T G");
  }
  const Eigen::Matrix4d q = lu.inverse();
  const Eigen::Matrix3d rot = enu_rotation(ecef_to_geodetic(receiver));
  const Eigen::Matrix3d q_enu = rot * q.topLeftCorner<3, 3>() * rot.transpose();

  DopValues dop;
  dop.gdop = std::sqrt(q.trace());
  dop.pdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2));
  dop.tdop = std::sqrt(q(3, 3));
  dop.hdop = std::sqrt(q_enu(0, 0) + q_enu(1, 1));
  dop.vdop = std::sqrt(q_enu(2, 2));
  return dop;
}

std::vector<std::size_t> select_lowest_gdop(std::span<const EcefPosition> candidates,
                                            const EcefPosition& receiver, int k,
                                            bool altitude_constraint) {
  const int min_k = altitude_constraint ? 3 : 4;
  if (k < min_k) {
    throw Error(ErrorCode::InvalidArgument, "subset size must be at least " + std::to_string(min_k));
  }
  const auto n = candidates.size();
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::InsufficientSatellites,
                "insufficient satellites: " + std::to_string(n) + " candidates for k=" +
                    std::to_string(k));
  }
  const GeometryMatrix all = geometry_matrix(candidates, receiver);

  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
  std::vector<std::size_t> best;
  double best_gdop = std::numeric_limits<double>::infinity();
  GeometryMatrix sub(k + (altitude_constraint ? 1 : 0), 4);
  if (altitude_constraint) {
    sub.block<1, 3>(k, 0) = receiver.vec().normalized().transpose();
    sub(k, 3) = 0.0;
  }
  while (true) {
    for (int r = 0; r < k; ++r) sub.row(r) = all.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]));
    try {
      const double gd = dilution_of_precision(sub, receiver).gdop;
      if (gd < best_gdop) {
        best_gdop = gd;
        best = idx;
      }
    } catch (const Error&) {
      // singular subset, never optimal
    }
    // next combination in lexicographic order
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - static_cast<std::size_t>(k) + static_cast<std::size_t>(pos)) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < k; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
  if (best.empty()) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: every subset is singular");
  return best;
}

bool export_limit_check(const EcefPosition& position, double speed) {
  const double altitude = position.norm() - kEarthRadius;
  return altitude > kExportAltitudeLimit && speed > kExportSpeedLimit;
}

// ---------------------------------------------------------------------------
// Gauss-Newton

namespace {

struct Workspace {
  std::vector<double> sx, sy, sz, range, ux, uy, uz, resid;

  explicit Workspace(std::span<const RangeObservation> obs) {
    const auto n = obs.size();
    sx.resize(n); sy.resize(n); sz.resize(n);
    range.resize(n); ux.resize(n); uy.resize(n); uz.resize(n); resid.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      sx[i] = obs[i].sat.position.x;
      sy[i] = obs[i].sat.position.y;
      sz[i] = obs[i].sat.position.z;
    }
  }

  // Residuals pr - (range + c d_s + bias + delay) at `pos`, where bias = -c d_r.
  void evaluate(std::span<const RangeObservation> obs, const Eigen::Vector3d& pos, double bias,
                const kernels::KernelTable& k) {
    k.line_of_sight({sx, sy, sz}, pos.x(), pos.y(), pos.z(), {range, ux, uy, uz});
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (range[i] == 0.0) {
        throw Error(ErrorCode::CoincidentPoints, "satellite coincides with receiver estimate");
      }
      const double modeled = obs[i].sat.clock_bias * kSpeedOfLight + bias + obs[i].modeled_delay;
      resid[i] = (obs[i].pseudorange - modeled) - range[i];
    }
  }
};

struct Constraint {
  bool enabled = false;
  double radius = 0.0;  // required |position|
};

PvtSolution gauss_newton(std::span<const RangeObservation> obs, const ClockedPosition& initial,
                         const SolverOptions& options, const Constraint& constraint) {
  const auto& k = kernels::active();
  Workspace ws(obs);
  Eigen::Vector3d pos = initial.position.vec();
  double bias = -kSpeedOfLight * initial.clock_bias;

  PvtSolution sol;
  sol.svns.reserve(obs.size());
  for (const auto& o : obs) sol.svns.push_back(o.sat.id.svn);

  double previous_step = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    ws.evaluate(obs, pos, bias, k);
    kernels::NormalEquations ne;
    k.normal_equations(ws.ux, ws.uy, ws.uz, ws.resid, ne);
    const Eigen::Matrix4d ata = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(&ne.ata[0][0]);
    const Eigen::Vector4d atb = Eigen::Map<const Eigen::Vector4d>(ne.atb);

    Eigen::Vector4d step;
    if (!constraint.enabled) {
      Eigen::FullPivLU<Eigen::Matrix4d> lu(ata);
      lu.setThreshold(1e-10);
      if (lu.rank() < 4) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: singular normal matrix");
      step = lu.solve(atb);
    } else {
      // Equality-constrained least squares through the KKT system.
      const double norm = pos.norm();
      Eigen::Matrix<double, 5, 5> kkt = Eigen::Matrix<double, 5, 5>::Zero();
      kkt.topLeftCorner<4, 4>() = ata;
      Eigen::Vector4d a = Eigen::Vector4d::Zero();
      a.head<3>() = pos / norm;
      kkt.block<4, 1>(0, 4) = a;
      kkt.block<1, 4>(4, 0) = a.transpose();
      Eigen::Matrix<double, 5, 1> rhs;
      rhs.head<4>() = atb;
      rhs(4) = constraint.radius - norm;
      Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(kkt);
      lu.setThreshold(1e-10);
      if (lu.rank() < 5) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: singular constrained system");
      step = lu.solve(rhs).head<4>();
    }
    if (!step.allFinite()) {
      sol.iterations = iter;
      break;
    }
    pos += step.head<3>();
    bias += step(3);
    sol.iterations = iter;
    sol.last_step = step.norm();
    if (sol.last_step < options.step_tolerance ||
        (sol.last_step < options.stagnation_tolerance && sol.last_step >= 0.5 * previous_step)) {
      sol.converged = true;
      break;
    }
    previous_step = sol.last_step;
  }

  ws.evaluate(obs, pos, bias, k);
  sol.position = EcefPosition::from(pos);
  sol.clock_bias = -bias / kSpeedOfLight;
  sol.residuals = ws.resid;
  return sol;
}

void attach_dop(PvtSolution& sol, std::span<const RangeObservation> obs, bool with_constraint) {
  std::vector<EcefPosition> sats;
  sats.reserve(obs.size());
  for (const auto& o : obs) sats.push_back(o.sat.position);
  GeometryMatrix g = geometry_matrix(sats, sol.position);
  if (with_constraint) {
    g.conservativeResize(g.rows() + 1, 4);
    g.block<1, 3>(g.rows() - 1, 0) = sol.position.vec().normalized().transpose();
    g(g.rows() - 1, 3) = 0.0;
  }
  try {
    sol.dop = dilution_of_precision(g, sol.position);
  } catch (const Error&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    sol.dop = {nan, nan, nan, nan, nan};
  }
}

std::optional<ClockedPosition> trilateration_start(std::span<const RangeObservation> obs) {
  if (obs.size() < 3) return std::nullopt;
  try {
    std::array<EcefPosition, 3> c;
    std::array<double, 3> r;
    for (int i = 0; i < 3; ++i) {
      c[i] = obs[i].sat.position;
      r[i] = obs[i].pseudorange - kSpeedOfLight * obs[i].sat.clock_bias - obs[i].modeled_delay;
    }
    return ClockedPosition{select_feasible(trilaterate_three_spheres(c, r)), 0.0};
  } catch (const Error&) {
    return std::nullopt;
  }
}

PvtSolution solve_with_fallback(std::span<const RangeObservation> obs,
                                const ClockedPosition& initial, const SolverOptions& options,
                                const Constraint& constraint) {
  PvtSolution sol = gauss_newton(obs, initial, options, constraint);
  if (!sol.converged && options.trilateration_fallback) {
    if (auto start = trilateration_start(obs)) {
      try {
        PvtSolution retry = gauss_newton(obs, *start, options, constraint);
        if (retry.converged) sol = std::move(retry);
      } catch (const Error&) {
        // keep the first attempt's partial result
      }
    }
  }
  attach_dop(sol, obs, constraint.enabled);
  return sol;
}

}  // namespace

PvtSolution solve_pvt(std::span<const RangeObservation> obs, const ClockedPosition& initial,
                      const SolverOptions& options) {
  if (obs.size() < 4) {
    throw Error(ErrorCode::InsufficientSatellites,
                "insufficient satellites: " + std::to_string(obs.size()) + " < 4");
  }
  return solve_with_fallback(obs, initial, options, {});
}

PvtSolution solve_altitude_aided(std::span<const RangeObservation> obs, double known_altitude,
                                 const ClockedPosition& initial, const SolverOptions& options) {
  if (obs.size() < 3) {
    throw Error(ErrorCode::InsufficientSatellites,
                "insufficient satellites: " + std::to_string(obs.size()) + " < 3");
  }
  const double radius = kEarthRadius + known_altitude;
  ClockedPosition start = initial;
  if (start.position.norm() < 1000.0) {
    // The constraint gradient is undefined at the Earth's center; start under
    // the centroid of the satellites instead.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& o : obs) centroid += o.sat.position.vec();
    start.position = EcefPosition::from(centroid.normalized() * radius);
  }
  return solve_with_fallback(obs, start, options, {true, radius});
}

}  // namespace gnsslab
