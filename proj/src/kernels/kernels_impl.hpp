#pragma once

#include "gnsslab/kernels.hpp"

namespace gnsslab::kernels::detail {

void line_of_sight_scalar(PointsSoA sats, double rx, double ry, double rz, LineOfSight out);
void normal_equations_scalar(std::span<const double> ux, std::span<const double> uy,
                             std::span<const double> uz, std::span<const double> resid,
                             NormalEquations& out);
void combine_scalar(std::span<const double> a, std::span<const double> b, double gamma,
                    std::span<double> out);
void axpy_scalar(std::span<const double> w, std::span<const double> p, double alpha,
                 std::span<double> out);
double squared_norm_axpy_scalar(std::span<const double> w, std::span<const double> p,
                                double alpha);

#if defined(GNSSLAB_HAVE_AVX2)
void line_of_sight_avx2(PointsSoA sats, double rx, double ry, double rz, LineOfSight out);
void normal_equations_avx2(std::span<const double> ux, std::span<const double> uy,
                           std::span<const double> uz, std::span<const double> resid,
                           NormalEquations& out);
void combine_avx2(std::span<const double> a, std::span<const double> b, double gamma,
                  std::span<double> out);
void axpy_avx2(std::span<const double> w, std::span<const double> p, double alpha,
               std::span<double> out);
double squared_norm_axpy_avx2(std::span<const double> w, std::span<const double> p,
                              double alpha);
#endif

// Shared by both variants so the tails are computed identically.
inline void line_of_sight_one(PointsSoA sats, double rx, double ry, double rz,
                              LineOfSight out, std::size_t i) {
  const double dx = sats.x[i] - rx;
  const double dy = sats.y[i] - ry;
  const double dz = sats.z[i] - rz;
  const double r = __builtin_sqrt((dx * dx + dy * dy) + dz * dz);
  out.range[i] = r;
  out.ux[i] = dx / r;
  out.uy[i] = dy / r;
  out.uz[i] = dz / r;
}

inline void normal_row(double gx, double gy, double gz, double r, NormalEquations& out) {
  const double g[4] = {-gx, -gy, -gz, 1.0};
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) out.ata[l][k] += g[l] * g[k];
    out.atb[k] += g[k] * r;
  }
}

}  // namespace gnsslab::kernels::detail
