#include "kernels_impl.hpp"

namespace gnsslab::kernels::detail {

void line_of_sight_scalar(PointsSoA sats, double rx, double ry, double rz, LineOfSight out) {
  for (std::size_t i = 0; i < sats.x.size(); ++i) line_of_sight_one(sats, rx, ry, rz, out, i);
}

void normal_equations_scalar(std::span<const double> ux, std::span<const double> uy,
                             std::span<const double> uz, std::span<const double> resid,
                             NormalEquations& out) {
  out = NormalEquations{};
  for (std::size_t i = 0; i < ux.size(); ++i) normal_row(ux[i], uy[i], uz[i], resid[i], out);
}

void combine_scalar(std::span<const double> a, std::span<const double> b, double gamma,
                    std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - gamma * b[i];
}

void axpy_scalar(std::span<const double> w, std::span<const double> p, double alpha,
                 std::span<double> out) {
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] + alpha * p[i];
}

double squared_norm_axpy_scalar(std::span<const double> w, std::span<const double> p,
                                double alpha) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = w[i] + alpha * p[i];
    s[i & 3] += t * t;
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

}  // namespace gnsslab::kernels::detail
