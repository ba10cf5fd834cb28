#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace unilab {

using cplx = std::complex<double>;

/// A point s = re + i*im of the complex plane (usually the critical strip).
struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;

  constexpr ComplexPoint() = default;
  constexpr ComplexPoint(double r, double i) : re(r), im(i) {}
  explicit ComplexPoint(cplx z) : re(z.real()), im(z.imag()) {}

  cplx value() const { return {re, im}; }
  bool finite() const { return std::isfinite(re) && std::isfinite(im); }
  ComplexPoint conj() const { return {re, -im}; }
  ComplexPoint shifted(double dt) const { return {re, im + dt}; }

  friend bool operator==(const ComplexPoint&, const ComplexPoint&) = default;
};

/// Uniform t-grid t_m = t0 + m*step, m = 0..count-1.
struct GridSweep {
  double t0 = 0.0;
  double step = 1.0;
  std::int64_t count = 1;

  double at(std::int64_t m) const { return t0 + static_cast<double>(m) * step; }
  double length() const { return static_cast<double>(count) * step; }
  double t_max() const { return at(count - 1); }

  /// Window [T, 2T] sampled with the given step.
  static GridSweep window(double T, double step);

  void validate() const;
};

}  // namespace unilab
