#include <cstdlib>
#include <string_view>

#include "unilab/error.hpp"
#include "unilab/kernels.hpp"

namespace unilab::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, "scalar", scalar::sweep,
                              scalar::euler_log, scalar::euler_product,
                              scalar::unit_circle};
constexpr KernelTable kAvx2{Isa::Avx2, "avx2", avx2::sweep, avx2::euler_log,
                            avx2::euler_product, avx2::unit_circle};

const KernelTable& select() {
  const char* env = std::getenv("UNILAB_SIMD");
  if (env != nullptr) {
    const std::string_view want{env};
    if (want == "scalar") return kScalar;
    if (want == "avx2" && supported(Isa::Avx2)) return kAvx2;
  }
  return supported(Isa::Avx2) ? kAvx2 : kScalar;
}

}  // namespace

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) fail(ErrorCode::InvalidArgument, "ISA not supported on this CPU");
  return isa == Isa::Avx2 ? kAvx2 : kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace unilab::kernels
