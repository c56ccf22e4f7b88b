#include "kernels_impl.hpp"

namespace gnsslab::kernels {

namespace {

constexpr KernelTable kScalar{
    Isa::Scalar,
    detail::line_of_sight_scalar,
    detail::normal_equations_scalar,
    detail::combine_scalar,
    detail::axpy_scalar,
    detail::squared_norm_axpy_scalar,
};

#if defined(GNSSLAB_HAVE_AVX2)
constexpr KernelTable kAvx2{
    Isa::Avx2,
    detail::line_of_sight_avx2,
    detail::normal_equations_avx2,
    detail::combine_avx2,
    detail::axpy_avx2,
    detail::squared_norm_axpy_avx2,
};
#endif

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return kScalar; }

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(GNSSLAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) noexcept {
#if defined(GNSSLAB_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

const KernelTable& active() noexcept {
  static const KernelTable& table =
      isa_available(Isa::Avx2) ? kernels_for(Isa::Avx2) : kScalar;
  return table;
}

}  // namespace gnsslab::kernels
