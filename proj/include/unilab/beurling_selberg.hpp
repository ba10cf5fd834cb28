#pragma once

// Band-limited majorant/minorant of sgn(x) and the smoothed interval
// indicators built from them. Fourier transforms of the building blocks are
// supported in [-1, 1] (scaled by the smoothing width for intervals).

#include <cstdint>

#include "unilab/types.hpp"

namespace unilab {

/// [a, b] with a < b; either end may be infinite.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  bool contains(double x) const { return a <= x && x <= b; }
  double length() const { return b - a; }
  void validate() const;
};

/// Scale of the smoothing: transforms are supported in |xi| < delta.
struct Smoothing {
  double delta = 1.0;
  void validate() const;
};

/// (sin(pi x) / (pi x))^2, the Fejer kernel; integral 1.
double fejer_kernel(double x);

/// 2 y^2 sum_{m >= 0} (y + m)^{-2} - 2y - 1 for y >= 0, taken as 1 at y = 0
/// (the limit). Lies in [0, 1] and measures how far the sgn interpolant
/// falls short of 1: interpolant(y) = 1 - fejer_kernel(y) * defect(y).
double interpolant_defect(double y);

/// Odd entire interpolant of sgn: 1 - K(x) G(x) for x >= 0, extended by oddness.
double sgn_interpolant(double x);

/// sgn_interpolant + fejer_kernel >= sgn(x).
double sgn_majorant(double x);
/// sgn_interpolant - fejer_kernel <= sgn(x).
double sgn_minorant(double x);

/// (minorant(delta (x - a)) + minorant(delta (b - x))) / 2; infinite ends
/// contribute their limit 1.
double smoothed_indicator(double x, const Interval& I, const Smoothing& d);

/// max(0, 1 - |xi|), the transform of the Fejer kernel.
double fejer_transform(double xi);

/// int K(x) e^{-2 pi i xi x} dx over [-half_width, half_width], by
/// Gauss-Legendre on unit panels.
double fejer_transform_numeric(double xi, double half_width = 1e4);

/// Transform of the indicator of a finite interval.
cplx indicator_transform(double xi, const Interval& I);

struct TransformEstimate {
  cplx value;
  /// Bound on the part of the integral outside the window.
  double window_tail = 0.0;
  std::int64_t panels = 0;
};

/// int F_I(x) e^{-2 pi i xi x} dx over [a - W, b + W], W = window / delta,
/// with panel doubling until successive values agree to tol. Finite
/// intervals only. Throws QuadratureNotConverged.
TransformEstimate smoothed_indicator_transform(double xi, const Interval& I, const Smoothing& d,
                                               double window = 2000.0, double tol = 1e-9);

}  // namespace unilab
