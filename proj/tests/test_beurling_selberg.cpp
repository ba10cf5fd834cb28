#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "unilab/beurling_selberg.hpp"
#include "unilab/error.hpp"

using namespace unilab;

namespace {

constexpr double kPi = std::numbers::pi;

// sgn interpolant from its defining series, summed in long double with
// 10^6 paired terms: (sin pi z / pi)^2 (sum_{n>=1} [(z-n)^-2 - (z+n)^-2] + 2/z).
double interpolant_by_series(double z) {
  if (z == 0.0) return 0.0;
  long double s = 0.0L;
  for (long n = 1000000; n >= 1; --n) {
    const long double a = static_cast<long double>(z) - n, b = static_cast<long double>(z) + n;
    s += 1.0L / (a * a) - 1.0L / (b * b);
  }
  s += 2.0L / z;
  const long double sp = std::sin(kPi * static_cast<long double>(z)) / kPi;
  return static_cast<double>(sp * sp * s);
}

// 2 y^2 sum_{m >= 0} (y + m)^{-2} - 2y - 1 by brute force with a tail integral.
double defect_by_sum(double y, long terms) {
  long double s = 0.0L;
  for (long m = terms - 1; m >= 0; --m) {
    const long double v = y + m;
    s += 1.0L / (v * v);
  }
  s += 1.0L / (y + terms - 0.5L);
  return static_cast<double>(2.0L * y * y * s - 2.0L * y - 1.0L);
}

}  // namespace

TEST(FejerKernel, ValuesAndZeros) {
  EXPECT_DOUBLE_EQ(fejer_kernel(0.0), 1.0);
  EXPECT_NEAR(fejer_kernel(0.5), 4.0 / (kPi * kPi), 1e-15);
  for (int n = 1; n <= 20; ++n) {
    EXPECT_EQ(fejer_kernel(n), 0.0);
    EXPECT_EQ(fejer_kernel(-n), 0.0);
  }
  // Taylor branch matches the closed form across the switch
  const double x = 1.0001e-4;
  const double s = std::sin(kPi * x) / (kPi * x);
  EXPECT_NEAR(fejer_kernel(x), s * s, 1e-15);
  EXPECT_NEAR(fejer_kernel(0.99e-4), fejer_kernel(1.01e-4), 1e-8);
}

TEST(InterpolantDefect, ReferenceValues) {
  // 0.2898... = 2 zeta(2) - 3; the rest from 20-digit arithmetic
  const std::pair<double, double> ref[] = {
      {1.0, 0.2898681336964528729},  {0.3, 0.6041656182993914933},
      {1.7, 0.1848857583479106520},  {4.2, 0.07849910900382002885},
      {10.0, 0.03326713633714922444}, {20.0, 0.01665834816249586523},
  };
  for (auto [y, g] : ref) EXPECT_NEAR(interpolant_defect(y), g, 2e-15 * std::max(1.0, g)) << y;
  EXPECT_DOUBLE_EQ(interpolant_defect(0.0), 1.0);
  EXPECT_NEAR(interpolant_defect(1.0), 2.0 * kPi * kPi / 6.0 - 3.0, 1e-15);
}

TEST(InterpolantDefect, BruteForceSum) {
  EXPECT_NEAR(interpolant_defect(1.0), defect_by_sum(1.0, 1000000), 1e-12);
  EXPECT_NEAR(interpolant_defect(7.5), defect_by_sum(7.5, 1000000), 1e-12);
  EXPECT_NEAR(interpolant_defect(35.0), defect_by_sum(35.0, 1000000), 1e-12);
}

TEST(InterpolantDefect, BoundedDecreasingAndContinuousAtSwitch) {
  double prev = interpolant_defect(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double y = i * 1e-3;
    const double g = interpolant_defect(y);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
    EXPECT_LT(g, prev) << y;
    prev = g;
  }
  for (int i = 0; i < 10000; ++i) {
    const double g = interpolant_defect(i * 0.005);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
  EXPECT_NEAR(interpolant_defect(std::nextafter(20.0, 0.0)), interpolant_defect(20.0), 1e-15);
  EXPECT_NEAR(interpolant_defect(0.0), interpolant_defect(1e-9), 1e-8);
  EXPECT_THROW(interpolant_defect(-1.0), Error);
}

TEST(SgnInterpolant, SeriesOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::vector<double> xs = {0.0, 0.3, 1.7, 4.2, -0.3, -4.2};
  for (int i = 0; i < 20; ++i) xs.push_back(u(rng));
  for (double x : xs) EXPECT_NEAR(sgn_interpolant(x), interpolant_by_series(x), 1e-11) << x;
}

TEST(SgnInterpolant, OddAndInterpolatesAtIntegers) {
  EXPECT_EQ(sgn_interpolant(0.0), 0.0);
  for (int n = 1; n <= 50; ++n) {
    EXPECT_EQ(sgn_interpolant(n), 1.0);
    EXPECT_EQ(sgn_interpolant(-n), -1.0);
  }
  for (double x : {0.1, 0.77, 3.3, 12.9}) EXPECT_EQ(sgn_interpolant(-x), -sgn_interpolant(x));
}

TEST(SgnBounds, SandwichOnGrid) {
  for (int i = 0; i <= 100000; ++i) {
    const double x = -50.0 + i * 1e-3;
    const double sg = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    ASSERT_GE(sgn_majorant(x), sg - 1e-14) << x;
    ASSERT_LE(sgn_minorant(x), sg + 1e-14) << x;
  }
  for (double x : {-3.3, -0.2, 0.0, 0.45, 7.9})
    EXPECT_NEAR(sgn_majorant(x) - sgn_minorant(x), 2.0 * fejer_kernel(x), 1e-15);
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(sgn_majorant(n), sgn_interpolant(n));
  // majorant at 0 is 1, minorant is -1
  EXPECT_DOUBLE_EQ(sgn_majorant(0.0), 1.0);
  EXPECT_DOUBLE_EQ(sgn_minorant(0.0), -1.0);
}

TEST(SgnBounds, UnitMassGap) {
  // integral of majorant - minorant = 2 int K = 2
  double sum = 0.0;
  const double h = 1e-3;
  for (int i = -2000000; i <= 2000000; ++i) sum += sgn_majorant(i * h) - sgn_minorant(i * h);
  EXPECT_NEAR(sum * h, 2.0, 2e-3);
}

TEST(SmoothedIndicator, MinorantOnGrid) {
  for (double delta : {1.0, 5.0, 25.0}) {
    for (double len : {0.1, 1.0, 10.0}) {
      const Interval I{-0.37, -0.37 + len};
      const Smoothing d{delta};
      for (int i = 0; i < 10000; ++i) {
        const double x = -50.0 + i * 0.01;
        const double f = smoothed_indicator(x, I, d);
        const double ind = I.contains(x) ? 1.0 : 0.0;
        const double kmass = fejer_kernel(delta * (x - I.a)) + fejer_kernel(delta * (I.b - x));
        ASSERT_LE(f, ind + 1e-14) << delta << " " << len << " " << x;
        ASSERT_LE(ind - f, kmass + 1e-14) << delta << " " << len << " " << x;
        ASSERT_LE(std::abs(f), 1.0 + 1e-14);
        ASSERT_NEAR(smoothed_indicator(I.a + I.b - x, I, d), f, 1e-12);
      }
    }
  }
}

TEST(SmoothedIndicator, InfiniteEndsAndValidation) {
  const Smoothing d{3.0};
  const Interval half{0.0, std::numeric_limits<double>::infinity()};
  EXPECT_NEAR(smoothed_indicator(100.0, half, d), 0.5 * (sgn_minorant(300.0) + 1.0), 1e-15);
  EXPECT_GT(smoothed_indicator(100.0, half, d), 0.99);
  EXPECT_LT(smoothed_indicator(-100.0, half, d), 1e-5);
  EXPECT_THROW(smoothed_indicator(0.0, Interval{1.0, 0.0}, d), Error);
  EXPECT_THROW(smoothed_indicator(0.0, Interval{0.0, 1.0}, Smoothing{0.0}), Error);
}

TEST(FejerTransform, QuadratureMatchesTriangle) {
  // truncation at W costs at most 1 / (pi^2 W)
  for (double xi : {0.0, 0.1, 0.25, 0.5, 0.8, 0.99, 1.2, 2.0}) {
    EXPECT_NEAR(fejer_transform_numeric(xi), fejer_transform(xi), 1e-4) << xi;
  }
  EXPECT_EQ(fejer_transform(1.5), 0.0);
}

TEST(IndicatorTransform, ClosedForm) {
  const Interval I{0.5, 2.0};
  EXPECT_EQ(indicator_transform(0.0, I), cplx(1.5, 0.0));
  // int_a^b e^{-2 pi i xi x} dx by midpoint rule
  const double xi = 0.7;
  cplx sum{0.0, 0.0};
  const int n = 200000;
  const double h = I.length() / n;
  for (int i = 0; i < n; ++i) sum += std::polar(h, -2.0 * kPi * xi * (I.a + (i + 0.5) * h));
  EXPECT_NEAR(std::abs(indicator_transform(xi, I) - sum), 0.0, 1e-9);
  EXPECT_THROW(indicator_transform(1.0, Interval{0.0, std::numeric_limits<double>::infinity()}), Error);
}

TEST(SmoothedIndicatorTransform, MassSandwichAtZero) {
  for (double delta : {1.0, 5.0}) {
    for (double len : {0.1, 1.0, 10.0}) {
      const Interval I{0.2, 0.2 + len};
      const auto est = smoothed_indicator_transform(0.0, I, Smoothing{delta}, 200.0, 1e-8);
      const double slack = est.window_tail + 1e-7;
      EXPECT_LE(est.value.real(), len + slack);
      EXPECT_GE(est.value.real(), len - 2.0 / delta - slack);
      EXPECT_NEAR(est.value.imag(), 0.0, 1e-12);
    }
  }
}

TEST(SmoothedIndicatorTransform, BandLimitAndDistance) {
  const Interval I{-0.4, 0.6};
  for (double delta : {1.0, 5.0}) {
    const Smoothing d{delta};
    const auto out = smoothed_indicator_transform(1.5 * delta, I, d, 200.0, 1e-8);
    EXPECT_LE(std::abs(out.value), 1e-3 + out.window_tail) << delta;
    for (double xi : {0.0, 0.2 * delta, 0.7 * delta}) {
      const auto est = smoothed_indicator_transform(xi, I, d, 200.0, 1e-8);
      const double gap = std::abs(est.value - indicator_transform(xi, I));
      EXPECT_LE(gap, 2.0 / delta + est.window_tail + 1e-7) << delta << " " << xi;
    }
  }
}

TEST(SmoothedIndicatorTransform, Validation) {
  const Interval inf{0.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(smoothed_indicator_transform(0.0, inf, Smoothing{1.0}), Error);
  EXPECT_THROW(smoothed_indicator_transform(0.0, Interval{0, 1}, Smoothing{1.0}, -1.0), Error);
}
