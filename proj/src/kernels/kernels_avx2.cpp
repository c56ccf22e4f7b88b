#include <immintrin.h>

#include "kernels_impl.hpp"

namespace gnsslab::kernels::detail {

void line_of_sight_avx2(PointsSoA sats, double rx, double ry, double rz, LineOfSight out) {
  const std::size_t n = sats.x.size();
  const std::size_t end = n & ~std::size_t{3};
  const __m256d vrx = _mm256_set1_pd(rx);
  const __m256d vry = _mm256_set1_pd(ry);
  const __m256d vrz = _mm256_set1_pd(rz);
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&sats.x[i]), vrx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&sats.y[i]), vry);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&sats.z[i]), vrz);
    const __m256d sq = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    const __m256d r = _mm256_sqrt_pd(sq);
    _mm256_storeu_pd(&out.range[i], r);
    _mm256_storeu_pd(&out.ux[i], _mm256_div_pd(dx, r));
    _mm256_storeu_pd(&out.uy[i], _mm256_div_pd(dy, r));
    _mm256_storeu_pd(&out.uz[i], _mm256_div_pd(dz, r));
  }
  for (std::size_t i = end; i < n; ++i) line_of_sight_one(sats, rx, ry, rz, out, i);
}

void normal_equations_avx2(std::span<const double> ux, std::span<const double> uy,
                           std::span<const double> uz, std::span<const double> resid,
                           NormalEquations& out) {
  // One register per column of G^T G; lane l of column k accumulates g[l]*g[k]
  // in row order, exactly as the scalar loop does.
  __m256d col[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(),
                    _mm256_setzero_pd()};
  __m256d rhs = _mm256_setzero_pd();
  const __m256d sign = _mm256_set_pd(0.0, -0.0, -0.0, -0.0);
  for (std::size_t i = 0; i < ux.size(); ++i) {
    const __m256d g = _mm256_xor_pd(_mm256_set_pd(1.0, uz[i], uy[i], ux[i]), sign);
    col[0] = _mm256_add_pd(col[0], _mm256_mul_pd(g, _mm256_set1_pd(-ux[i])));
    col[1] = _mm256_add_pd(col[1], _mm256_mul_pd(g, _mm256_set1_pd(-uy[i])));
    col[2] = _mm256_add_pd(col[2], _mm256_mul_pd(g, _mm256_set1_pd(-uz[i])));
    col[3] = _mm256_add_pd(col[3], _mm256_mul_pd(g, _mm256_set1_pd(1.0)));
    rhs = _mm256_add_pd(rhs, _mm256_mul_pd(g, _mm256_set1_pd(resid[i])));
  }
  alignas(32) double tmp[4];
  for (int k = 0; k < 4; ++k) {
    _mm256_store_pd(tmp, col[k]);
    for (int l = 0; l < 4; ++l) out.ata[l][k] = tmp[l];
  }
  _mm256_store_pd(tmp, rhs);
  for (int k = 0; k < 4; ++k) out.atb[k] = tmp[k];
}

void combine_avx2(std::span<const double> a, std::span<const double> b, double gamma,
                  std::span<double> out) {
  const std::size_t n = a.size();
  const std::size_t end = n & ~std::size_t{3};
  const __m256d g = _mm256_set1_pd(gamma);
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(&a[i]),
                                    _mm256_mul_pd(g, _mm256_loadu_pd(&b[i])));
    _mm256_storeu_pd(&out[i], v);
  }
  for (std::size_t i = end; i < n; ++i) out[i] = a[i] - gamma * b[i];
}

void axpy_avx2(std::span<const double> w, std::span<const double> p, double alpha,
               std::span<double> out) {
  const std::size_t n = w.size();
  const std::size_t end = n & ~std::size_t{3};
  const __m256d va = _mm256_set1_pd(alpha);
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(&w[i]),
                                    _mm256_mul_pd(va, _mm256_loadu_pd(&p[i])));
    _mm256_storeu_pd(&out[i], v);
  }
  for (std::size_t i = end; i < n; ++i) out[i] = w[i] + alpha * p[i];
}

double squared_norm_axpy_avx2(std::span<const double> w, std::span<const double> p,
                              double alpha) {
  const std::size_t n = w.size();
  const std::size_t end = n & ~std::size_t{3};
  const __m256d va = _mm256_set1_pd(alpha);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d t = _mm256_add_pd(_mm256_loadu_pd(&w[i]),
                                    _mm256_mul_pd(va, _mm256_loadu_pd(&p[i])));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t i = end; i < n; ++i) {
    const double t = w[i] + alpha * p[i];
    s[i & 3] += t * t;
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

}  // namespace gnsslab::kernels::detail
