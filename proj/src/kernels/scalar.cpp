// Reference kernels: plain loops, std::complex arithmetic, library sin/cos.

#include <cmath>
#include <complex>
#include <numbers>

#include "unilab/kernels.hpp"

namespace unilab::kernels::scalar {

using C = std::complex<double>;

void sweep(const SweepArgs& a) {
  for (std::size_t m = 0; m < a.steps; ++m) {
    for (std::size_t r = 0; r < a.rows; ++r) {
      const std::size_t off = r * a.terms;
      C acc{0.0, 0.0};
      for (std::size_t n = 0; n < a.terms; ++n) {
        acc += C{a.w_re[off + n], a.w_im[off + n]} *
               C{a.phase_re[n], a.phase_im[n]};
      }
      a.out_re[r * a.steps + m] = acc.real();
      a.out_im[r * a.steps + m] = acc.imag();
    }
    for (std::size_t n = 0; n < a.terms; ++n) {
      const C z = C{a.phase_re[n], a.phase_im[n]} * C{a.rot_re[n], a.rot_im[n]};
      a.phase_re[n] = z.real();
      a.phase_im[n] = z.imag();
    }
  }
}

void euler_log(const EulerLogArgs& a) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const std::size_t off = r * a.primes;
    C acc{0.0, 0.0};
    for (std::size_t p = 0; p < a.primes; ++p) {
      const C w = C{a.x_re[p], a.x_im[p]} * C{a.c_re[off + p], a.c_im[off + p]};
      C h{1.0 / kLogSeriesTerms, 0.0};
      for (int k = kLogSeriesTerms - 1; k >= 1; --k) h = h * w + 1.0 / k;
      acc += h * w;
    }
    a.out_re[r] = acc.real();
    a.out_im[r] = acc.imag();
  }
}

void euler_product(const EulerProductArgs& a) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const std::size_t off = r * a.primes;
    C prod{1.0, 0.0};
    C dsum{0.0, 0.0};
    for (std::size_t p = 0; p < a.primes; ++p) {
      const C w = C{a.x_re[p], a.x_im[p]} * C{a.c_re[off + p], a.c_im[off + p]};
      const C d = 1.0 - w;
      prod *= d;
      dsum += w * a.log_p[p] / d;
    }
    a.prod_re[r] = prod.real();
    a.prod_im[r] = prod.imag();
    a.dsum_re[r] = dsum.real();
    a.dsum_im[r] = dsum.imag();
  }
}

void unit_circle(const UnitCircleArgs& a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    const double th = two_pi * a.u[i];
    a.cos_out[i] = std::cos(th);
    a.sin_out[i] = std::sin(th);
  }
}

}  // namespace unilab::kernels::scalar
