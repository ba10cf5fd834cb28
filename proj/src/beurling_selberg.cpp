#include "unilab/beurling_selberg.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "unilab/error.hpp"

namespace unilab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kShift = 50;
constexpr double kAsymptoticFrom = 20.0;

using Gauss = boost::math::quadrature::gauss<double, 20>;

// sin(pi x), exactly zero at integers.
double sin_pi(double x) {
  const double r = std::remainder(x, 2.0);  // exact, in [-1, 1]
  double a = std::abs(r);
  if (a > 0.5) a = 1.0 - a;
  const double s = std::sin(kPi * a);
  return r < 0.0 ? -s : s;
}

// sum_{m >= 0} (x + m)^{-2} for x >= 1: shift past kShift terms, then the
// asymptotic series (error below 1e-20 at x >= 51).
long double trigamma(long double x) {
  long double head = 0.0L;
  for (int m = kShift - 1; m >= 0; --m) {
    const long double v = x + m;
    head += 1.0L / (v * v);
  }
  const long double z = x + kShift;
  const long double iz = 1.0L / z, iz2 = iz * iz;
  const long double tail =
      iz + 0.5L * iz2 +
      iz * iz2 * (1.0L / 6 + iz2 * (-1.0L / 30 + iz2 * (1.0L / 42 + iz2 * (-1.0L / 30))));
  return head + tail;
}

}  // namespace

void Interval::validate() const {
  require(!std::isnan(a) && !std::isnan(b) && a < b, "Interval: requires a < b");
}

void Smoothing::validate() const {
  require(std::isfinite(delta) && delta > 0.0, "Smoothing: delta must be positive");
}

double fejer_kernel(double x) {
  if (std::abs(x) < 1e-4) {
    const double u = kPi * x;
    const double u2 = u * u;
    return 1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 45.0;
  }
  if (!std::isfinite(x)) return 0.0;
  const double s = sin_pi(x) / (kPi * x);
  return s * s;
}

double interpolant_defect(double y) {
  require(y >= 0.0, "interpolant_defect: requires y >= 0");
  if (y >= kAsymptoticFrom) {
    if (std::isinf(y)) return 0.0;
    const double iy = 1.0 / y, iy2 = iy * iy;
    return iy * (1.0 / 3.0 +
                 iy2 * (-1.0 / 15.0 +
                        iy2 * (1.0 / 21.0 +
                               iy2 * (-1.0 / 15.0 +
                                      iy2 * (5.0 / 33.0 + iy2 * (-691.0 / 1365.0 + iy2 * 7.0 / 3.0))))));
  }
  // the m = 0 term contributes exactly 2; the rest is 2 y^2 sum_{m >= 0} (y + 1 + m)^{-2}
  // the sum cancels against 2y + 1 to about y^2 ulps, hence the long double
  const long double yl = y;
  return static_cast<double>(1.0L - 2.0L * yl + 2.0L * yl * yl * trigamma(yl + 1.0L));
}

double sgn_interpolant(double x) {
  if (x < 0.0) return -sgn_interpolant(-x);
  return 1.0 - fejer_kernel(x) * interpolant_defect(x);
}

double sgn_majorant(double x) { return sgn_interpolant(x) + fejer_kernel(x); }

double sgn_minorant(double x) { return sgn_interpolant(x) - fejer_kernel(x); }

double smoothed_indicator(double x, const Interval& I, const Smoothing& d) {
  I.validate();
  d.validate();
  const double left = std::isinf(I.a) ? 1.0 : sgn_minorant(d.delta * (x - I.a));
  const double right = std::isinf(I.b) ? 1.0 : sgn_minorant(d.delta * (I.b - x));
  return 0.5 * (left + right);
}

double fejer_transform(double xi) { return std::max(0.0, 1.0 - std::abs(xi)); }

double fejer_transform_numeric(double xi, double half_width) {
  require(half_width > 0.0, "fejer_transform_numeric: half_width must be positive");
  // even integrand: 2 int_0^W K(x) cos(2 pi xi x) dx
  auto f = [xi](double x) { return fejer_kernel(x) * std::cos(2.0 * kPi * xi * x); };
  const auto panels = static_cast<std::int64_t>(std::ceil(half_width));
  const double w = half_width / static_cast<double>(panels);
  double sum = 0.0;
  for (std::int64_t i = panels - 1; i >= 0; --i)
    sum += Gauss::integrate(f, static_cast<double>(i) * w, static_cast<double>(i + 1) * w);
  return 2.0 * sum;
}

cplx indicator_transform(double xi, const Interval& I) {
  I.validate();
  require(std::isfinite(I.a) && std::isfinite(I.b), "indicator_transform: finite interval required");
  if (xi == 0.0) return {I.length(), 0.0};
  const cplx ea = std::polar(1.0, -2.0 * kPi * xi * I.a);
  const cplx eb = std::polar(1.0, -2.0 * kPi * xi * I.b);
  return (ea - eb) / cplx(0.0, 2.0 * kPi * xi);
}

TransformEstimate smoothed_indicator_transform(double xi, const Interval& I, const Smoothing& d,
                                               double window, double tol) {
  I.validate();
  d.validate();
  require(std::isfinite(I.a) && std::isfinite(I.b),
          "smoothed_indicator_transform: finite interval required");
  require(window > 0.0 && tol > 0.0, "smoothed_indicator_transform: window and tol must be positive");
  const double W = window / d.delta;
  const double lo = I.a - W, hi = I.b + W;
  auto integrate = [&](std::int64_t panels) {
    const double w = (hi - lo) / static_cast<double>(panels);
    auto re = [&](double x) { return smoothed_indicator(x, I, d) * std::cos(2.0 * kPi * xi * x); };
    auto im = [&](double x) { return -smoothed_indicator(x, I, d) * std::sin(2.0 * kPi * xi * x); };
    double sr = 0.0, si = 0.0;
    for (std::int64_t i = 0; i < panels; ++i) {
      const double x0 = lo + static_cast<double>(i) * w;
      const double x1 = i + 1 == panels ? hi : x0 + w;
      sr += Gauss::integrate(re, x0, x1);
      si += xi == 0.0 ? 0.0 : Gauss::integrate(im, x0, x1);
    }
    return cplx{sr, si};
  };
  // start with panels of width ~ 1 / (2 max(delta, |xi|, 1))
  const double scale = std::max({d.delta, std::abs(xi), 1.0});
  auto panels = static_cast<std::int64_t>(std::ceil((hi - lo) * 2.0 * scale));
  cplx prev = integrate(panels);
  constexpr std::int64_t kMaxPanels = std::int64_t{1} << 24;
  while (panels < kMaxPanels) {
    panels *= 2;
    const cplx cur = integrate(panels);
    if (std::abs(cur - prev) <= tol) {
      // |F(x)| <= 3 / (2 pi^2 delta^2 dist^2) beyond the interval; both sides
      return {cur, 3.0 / (kPi * kPi * d.delta * d.delta * W), panels};
    }
    prev = cur;
  }
  fail(ErrorCode::QuadratureNotConverged, "smoothed_indicator_transform: panel doubling did not converge");
}

}  // namespace unilab
