#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and an AVX2+FMA variant; the variant is picked once at
// runtime (CPUID), overridable with UNILAB_SIMD=scalar|avx2.
// Variants agree to rounding (see tests/test_kernels.cpp), not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace unilab::kernels {

enum class Isa { Scalar, Avx2 };

/// Multi-row rotating-phase Dirichlet sum.
///   out[r*steps + m] = sum_n w[r*terms + n] * z_n(m),
///   z_n(0) = phase[n], z_n(m+1) = z_n(m) * rot[n].
/// On return phase[n] holds z_n(steps).
struct SweepArgs {
  std::size_t rows = 0;
  std::size_t terms = 0;
  std::size_t steps = 0;
  std::span<const double> w_re, w_im;      // rows x terms
  std::span<double> phase_re, phase_im;    // terms, in/out
  std::span<const double> rot_re, rot_im;  // terms
  std::span<double> out_re, out_im;        // rows x steps
};

/// Sum over primes of -log(1 - x_p c_{r,p}) by the power series
/// sum_k w^k / k, truncated at kLogSeriesTerms. Callers must only pass
/// primes with |c_{r,p}| <= kLogSeriesRadius.
struct EulerLogArgs {
  std::size_t rows = 0;
  std::size_t primes = 0;
  std::span<const double> x_re, x_im;  // primes
  std::span<const double> c_re, c_im;  // rows x primes
  std::span<double> out_re, out_im;    // rows (overwritten)
};

inline constexpr double kLogSeriesRadius = 0.03;
inline constexpr int kLogSeriesTerms = 11;

/// Per row: prod_p (1 - w_p) and sum_p w_p log p / (1 - w_p), w_p = x_p c_{r,p}.
struct EulerProductArgs {
  std::size_t rows = 0;
  std::size_t primes = 0;
  std::span<const double> x_re, x_im;   // primes
  std::span<const double> c_re, c_im;   // rows x primes
  std::span<const double> log_p;        // primes
  std::span<double> prod_re, prod_im;   // rows (overwritten)
  std::span<double> dsum_re, dsum_im;   // rows (overwritten)
};

/// (cos 2*pi*u, sin 2*pi*u) for u in [0, 1).
struct UnitCircleArgs {
  std::span<const double> u;
  std::span<double> cos_out, sin_out;
};

struct KernelTable {
  Isa isa;
  std::string_view name;
  void (*sweep)(const SweepArgs&);
  void (*euler_log)(const EulerLogArgs&);
  void (*euler_product)(const EulerProductArgs&);
  void (*unit_circle)(const UnitCircleArgs&);
};

bool supported(Isa isa) noexcept;
const KernelTable& table(Isa isa);
const KernelTable& active();

namespace scalar {
void sweep(const SweepArgs&);
void euler_log(const EulerLogArgs&);
void euler_product(const EulerProductArgs&);
void unit_circle(const UnitCircleArgs&);
}  // namespace scalar

namespace avx2 {
void sweep(const SweepArgs&);
void euler_log(const EulerLogArgs&);
void euler_product(const EulerProductArgs&);
void unit_circle(const UnitCircleArgs&);
}  // namespace avx2

}  // namespace unilab::kernels
