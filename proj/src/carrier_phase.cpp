#include "gnsslab/carrier_phase.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "gnsslab/constants.hpp"
#include "gnsslab/kernels.hpp"

namespace gnsslab {

using constants::kSpeedOfLight;
using constants::kWavelengthL1;

namespace {

void check_pairing(const PvtSolution& code, std::span<const PhaseObservation> phase_obs) {
  if (!code.converged) throw Error(ErrorCode::NotConverged, "code solution did not converge");
  (void)phase_obs;
}

/// Candidate integer offsets (relative to the rounded floats) and their score.
struct Candidate {
  double score = std::numeric_limits<double>::infinity();
  std::vector<int> delta;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.delta < b.delta;  // lexicographic tie order
}

struct TopTwo {
  Candidate best, second;

  void offer(double score, const std::vector<int>& delta) {
    if (!(score <= second.score)) return;
    Candidate c{score, delta};
    if (better(c, best)) {
      second = std::move(best);
      best = std::move(c);
    } else if (better(c, second)) {
      second = std::move(c);
    }
  }

  void merge(const TopTwo& o) {
    if (!o.best.delta.empty()) offer(o.best.score, o.best.delta);
    if (!o.second.delta.empty()) offer(o.second.score, o.second.delta);
  }
};

/// Depth-first enumeration over the free satellites. `levels[j]` holds the
/// projected column for free satellite j; the running residual is
/// w = z + sum_j delta_j * column_j.
class Searcher {
 public:
  Searcher(const std::vector<std::vector<double>>& columns, int radius)
      : columns_(columns), radius_(radius), n_(columns.empty() ? 0 : columns[0].size()),
        kernels_(kernels::active()) {}

  TopTwo run(const std::vector<double>& z, int first_delta) {
    TopTwo top;
    std::vector<int> delta(columns_.size(), 0);
    std::vector<std::vector<double>> stack(columns_.size() + 1, std::vector<double>(n_));
    if (columns_.size() == 1) {
      delta[0] = first_delta;
      top.offer(kernels_.squared_norm_axpy(z, columns_[0], first_delta), delta);
      return top;
    }
    delta[0] = first_delta;
    kernels_.axpy(z, columns_[0], first_delta, stack[1]);
    descend(1, stack, delta, top);
    return top;
  }

 private:
  void descend(std::size_t level, std::vector<std::vector<double>>& stack, std::vector<int>& delta,
               TopTwo& top) {
    const auto& col = columns_[level];
    if (level + 1 == columns_.size()) {
      for (int d = -radius_; d <= radius_; ++d) {
        delta[level] = d;
        top.offer(kernels_.squared_norm_axpy(stack[level], col, d), delta);
      }
      return;
    }
    for (int d = -radius_; d <= radius_; ++d) {
      delta[level] = d;
      kernels_.axpy(stack[level], col, d, stack[level + 1]);
      descend(level + 1, stack, delta, top);
    }
  }

  const std::vector<std::vector<double>>& columns_;
  int radius_;
  std::size_t n_;
  const kernels::KernelTable& kernels_;
};

}  // namespace

AmbiguitySet float_ambiguities(const PvtSolution& code_solution,
                               std::span<const PhaseObservation> phase_obs) {
  check_pairing(code_solution, phase_obs);
  AmbiguitySet out;
  out.entries.reserve(phase_obs.size());
  for (const auto& p : phase_obs) {
    const double predicted = true_range(p.sat.position, code_solution.position) +
                             kSpeedOfLight * (p.sat.clock_bias - code_solution.clock_bias);
    out.entries.push_back({p.sat.id.svn, p.phase_l1 - predicted / kWavelengthL1, 0, 0.0});
  }
  return out;
}

AmbiguitySet resolve_integers(const AmbiguitySet& floats,
                              std::span<const PhaseObservation> phase_obs,
                              const PvtSolution& code_solution,
                              const AmbiguitySearchOptions& options) {
  check_pairing(code_solution, phase_obs);
  const std::size_t n = phase_obs.size();
  if (n < 5) {
    throw Error(ErrorCode::InsufficientSatellites,
                "insufficient satellites: ambiguity search needs 5, have " + std::to_string(n));
  }
  if (floats.entries.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "float ambiguities do not match phase observations");
  }
  if (options.radius < 0) throw Error(ErrorCode::Range, "search radius must be >= 0");

  const std::uint64_t width = 2 * static_cast<std::uint64_t>(options.radius) + 1;
  std::uint64_t count = 1;
  for (std::size_t i = 1; i < n; ++i) {
    count *= width;
    if (count > options.max_candidates) {
      throw Error(ErrorCode::SearchTooLarge,
                  "radius too large: search space exceeds " + std::to_string(options.max_candidates) +
                      " candidates");
    }
  }

  // Linearize at the code fix: y = G dx + lambda (N - base) + e.
  const auto rows = static_cast<Eigen::Index>(n);
  std::vector<EcefPosition> sats;
  Eigen::VectorXd y(rows);
  std::vector<std::int64_t> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = phase_obs[i];
    sats.push_back(p.sat.position);
    base[i] = std::llround(floats.entries[i].float_estimate);
    const double predicted = true_range(p.sat.position, code_solution.position) +
                             kSpeedOfLight * (p.sat.clock_bias - code_solution.clock_bias);
    y(static_cast<Eigen::Index>(i)) =
        (p.phase_l1 - static_cast<double>(base[i])) * kWavelengthL1 - predicted;
  }
  const GeometryMatrix g = geometry_matrix(sats, code_solution.position);
  Eigen::FullPivLU<Eigen::Matrix4d> lu(g.transpose() * g);
  lu.setThreshold(1e-10);
  if (lu.rank() < 4) throw Error(ErrorCode::DegenerateGeometry, "degenerate geometry: singular normal matrix");
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(rows, rows) - g * lu.inverse() * g.transpose();

  const std::size_t ref = 0;
  const Eigen::VectorXd zv = proj * y;
  std::vector<double> z(zv.data(), zv.data() + rows);
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> free_index;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == ref) continue;
    const Eigen::VectorXd c = -kWavelengthL1 * proj.col(static_cast<Eigen::Index>(i));
    columns.emplace_back(c.data(), c.data() + rows);
    free_index.push_back(i);
  }

  // Split the first free level across workers; merge in a fixed order.
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(width));
  std::vector<TopTwo> partial(width);
  auto work = [&](unsigned worker) {
    Searcher s(columns, options.radius);
    for (std::uint64_t k = worker; k < width; k += threads) {
      partial[k] = s.run(z, static_cast<int>(k) - options.radius);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < threads; ++w) jobs.push_back(std::async(std::launch::async, work, w));
    for (auto& j : jobs) j.get();
  }
  TopTwo top;
  for (const auto& p : partial) top.merge(p);

  AmbiguitySet out = floats;
  out.candidates = count;
  out.reference = ref;
  out.best_score = top.best.score;
  out.second_score = top.second.delta.empty() ? std::numeric_limits<double>::infinity()
                                              : top.second.score;
  out.ratio = out.best_score > 0.0 ? out.second_score / out.best_score
                                   : std::numeric_limits<double>::infinity();

  std::vector<double> w = z;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    kernels::active().axpy(w, columns[j], top.best.delta[j], w);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.entries[i].resolved = base[i];
    out.entries[i].residual = w[i] / kWavelengthL1;
  }
  for (std::size_t j = 0; j < free_index.size(); ++j) {
    out.entries[free_index[j]].resolved += top.best.delta[j];
  }

  if (out.ratio < options.ratio_threshold) {
    std::ostringstream msg;
    msg << "ambiguity not resolved: ratio " << out.ratio << " below " << options.ratio_threshold;
    throw Error(ErrorCode::AmbiguityNotResolved, msg.str());
  }
  out.resolved = true;
  return out;
}

PvtSolution phase_position(std::span<const PhaseObservation> phase_obs,
                           const AmbiguitySet& resolved, const PvtSolution& initial,
                           const SolverOptions& options) {
  if (!resolved.resolved || resolved.entries.size() != phase_obs.size()) {
    throw Error(ErrorCode::AmbiguityNotResolved, "ambiguities must be resolved for every satellite");
  }
  std::vector<RangeObservation> obs;
  obs.reserve(phase_obs.size());
  for (std::size_t i = 0; i < phase_obs.size(); ++i) {
    const auto& e = resolved.entries[i];
    if (e.svn != phase_obs[i].sat.id.svn) {
      throw Error(ErrorCode::InvalidArgument, "ambiguity set order does not match observations");
    }
    obs.push_back({phase_obs[i].sat,
                   (phase_obs[i].phase_l1 - static_cast<double>(e.resolved)) * kWavelengthL1, 0.0});
  }
  return solve_pvt(obs, {initial.position, initial.clock_bias}, options);
}

}  // namespace gnsslab
