#pragma once

// Data-parallel inner loops used by the solvers. Every kernel has a scalar
// reference implementation and, where the target supports it, an AVX2
// variant. Variants are required to produce bit-identical results to the
// scalar reference: element-wise operations use the same IEEE operations in
// the same order, and reductions use four interleaved partial sums that are
// combined as (s0 + s1) + (s2 + s3) in both variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace gnsslab::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Structure-of-arrays view over satellite coordinates.
struct PointsSoA {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> z;
};

/// Output buffers for line_of_sight; all of length n.
struct LineOfSight {
  std::span<double> range;
  std::span<double> ux;
  std::span<double> uy;
  std::span<double> uz;
};

/// Full symmetric 4x4 normal matrix and the
/// right-hand side for design rows (-ux, -uy, -uz, 1).
struct NormalEquations {
  double ata[4][4] = {};
  double atb[4] = {};
};

struct KernelTable {
  Isa isa;

  /// Range and unit vector from the receiver to every point. A zero range
  /// yields non-finite unit vectors; callers check for coincident points.
  void (*line_of_sight)(PointsSoA sats, double rx, double ry, double rz, LineOfSight out);

  /// Accumulates G^T G and G^T r over the rows in input order.
  void (*normal_equations)(std::span<const double> ux, std::span<const double> uy,
                           std::span<const double> uz, std::span<const double> resid,
                           NormalEquations& out);

  /// out[i] = a[i] - gamma * b[i]
  void (*combine)(std::span<const double> a, std::span<const double> b, double gamma,
                  std::span<double> out);

  /// out[i] = w[i] + alpha * p[i]
  void (*axpy)(std::span<const double> w, std::span<const double> p, double alpha,
               std::span<double> out);

  /// sum_i (w[i] + alpha * p[i])^2
  double (*squared_norm_axpy)(std::span<const double> w, std::span<const double> p,
                              double alpha);
};

const KernelTable& scalar_kernels() noexcept;

/// True when the AVX2 variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Table for a specific ISA; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa) noexcept;

/// Best available table, selected once at first use.
const KernelTable& active() noexcept;

}  // namespace gnsslab::kernels
