#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "unilab/error.hpp"
#include "unilab/parallel.hpp"
#include "unilab/zeta_eval.hpp"
#include "zeta_oracle.hpp"

using namespace unilab;

namespace {

constexpr double kPi = std::numbers::pi;

// Frozen from the eta-series oracle (50-digit arithmetic); cross-checked
// against an unrelated arbitrary-precision package during development.
const cplx kZeta_075_100{2.002991995255395825, -0.05439207119009258692};
const cplx kZetaPrime_075_50{1.004071769857080002, -0.1140064979767974431};
const cplx kZeta_075_50{0.2390352412598612932, 0.3182488887062250165};
const cplx kZeta_06_1000{0.6288612811538081599, 0.5984607865281873078};
const cplx kZetaPrime_06_1000{2.035812580229864841, -2.706542340837450620};
const cplx kLogZeta_075_100{0.6950106325967881604, -0.02714873916802905486};

TEST(Oracle, MatchesFrozenValues) {
  auto r = oracle::eta_zeta(0.75, 100.0);
  EXPECT_LT(std::abs(r.zeta - kZeta_075_100), 1e-15);
  r = oracle::eta_zeta(0.75, 50.0);
  EXPECT_LT(std::abs(r.zeta - kZeta_075_50), 1e-15);
  EXPECT_LT(std::abs(r.zeta_prime - kZetaPrime_075_50), 1e-15);
  r = oracle::eta_zeta(0.6, 1000.0);
  EXPECT_LT(std::abs(r.zeta - kZeta_06_1000), 1e-14);
  EXPECT_LT(std::abs(r.zeta_prime - kZetaPrime_06_1000), 1e-13);
  EXPECT_LT(std::abs(oracle::log_zeta_continued(0.75, 100.0) - kLogZeta_075_100), 1e-12);
}

TEST(Oracle, KnownRealValues) {
  EXPECT_NEAR(oracle::eta_zeta(2.0, 0.0).zeta.real(), kPi * kPi / 6.0, 1e-15);
  EXPECT_NEAR(oracle::eta_zeta(4.0, 0.0).zeta.real(), std::pow(kPi, 4) / 90.0, 1e-15);
}

TEST(Zeta, SpecialValues) {
  EXPECT_NEAR(zeta({2.0, 0.0}).real(), kPi * kPi / 6.0, 1e-12);
  EXPECT_NEAR(zeta({2.0, 0.0}).imag(), 0.0, 1e-15);
  EXPECT_NEAR(zeta({0.0, 0.0}).real(), -0.5, 1e-12);
  EXPECT_NEAR(zeta({-0.5, 0.0}).real(), -0.2078862249773545660, 1e-12);
}

TEST(Zeta, FrozenReferencePoints) {
  EXPECT_LT(std::abs(zeta({0.75, 100.0}) - kZeta_075_100), 1e-12);
  EXPECT_LT(std::abs(zeta({0.75, 50.0}) - kZeta_075_50), 1e-12);
  EXPECT_LT(std::abs(zeta({0.6, 1000.0}) - kZeta_06_1000), 1e-12);
  EXPECT_LT(std::abs(zeta_prime({0.75, 50.0}) - kZetaPrime_075_50), 1e-11);
  EXPECT_LT(std::abs(zeta_prime({0.6, 1000.0}) - kZetaPrime_06_1000), 1e-11);
}

TEST(Zeta, MatchesOracleOnRandomStripPoints) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sig(0.6, 2.0), tt(-1000.0, 1000.0);
  for (int i = 0; i < 25; ++i) {
    const double s = sig(rng), t = tt(rng);
    const auto ref = oracle::eta_zeta(s, t);
    EXPECT_LT(std::abs(zeta({s, t}) - ref.zeta), 1e-11) << s << " " << t;
    EXPECT_LT(std::abs(zeta_prime({s, t}) - ref.zeta_prime), 1e-10) << s << " " << t;
  }
}

TEST(Zeta, Reflection) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sig(0.51, 2.0), tt(-1000.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const ComplexPoint s{sig(rng), tt(rng)};
    EXPECT_LT(std::abs(zeta(s.conj()) - std::conj(zeta(s))), 1e-12);
  }
  const ComplexPoint s{0.8, 7.0};
  EXPECT_LT(std::abs(zeta_prime(s.conj()) - std::conj(zeta_prime(s))), 1e-12);
}

TEST(Zeta, SeriesAgreementInAbsoluteRegion) {
  const std::int64_t big = 1'000'000;
  for (double sigma : {1.5, 1.8, 2.5}) {
    const double t = 3.7;
    cplx sum{0.0, 0.0};
    for (std::int64_t n = big; n >= 1; --n)
      sum += std::exp(-sigma * std::log(static_cast<double>(n))) * unit_phase(t, n);
    const double tail = std::pow(static_cast<double>(big), 1.0 - sigma) / (sigma - 1.0);
    EXPECT_LE(std::abs(zeta({sigma, t}) - sum), tail + 1e-12) << sigma;
  }
}

TEST(Zeta, DerivativeMatchesFiniteDifference) {
  const double h = 1e-5;
  auto fd = [&](ComplexPoint s) {
    return (zeta({s.re + h, s.im}) - zeta({s.re - h, s.im})) / (2.0 * h);
  };
  EXPECT_LT(std::abs(zeta_prime({3.0, 0.0}) - fd({3.0, 0.0})), 1e-8);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sig(0.6, 2.0), tt(-1000.0, 1000.0);
  for (int i = 0; i < 50; ++i) {
    const ComplexPoint s{sig(rng), tt(rng)};
    const cplx d = zeta_prime(s);
    EXPECT_LE(std::abs(d - fd(s)), 1e-6 * std::abs(d)) << s.re << " " << s.im;
  }
}

TEST(Zeta, Errors) {
  try {
    zeta({1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PoleAtOne);
  }
  EvalSettings tight;
  tight.max_terms = 50;
  try {
    zeta({0.75, 1e5}, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  EvalSettings bad;
  bad.target_abs_err = 1e-15;
  EXPECT_THROW(zeta({2.0, 0.0}, bad), Error);
  bad = {};
  bad.em_order = 21;
  EXPECT_THROW(zeta({2.0, 0.0}, bad), Error);
}

TEST(LogZeta, RealAxisIsPrincipal) {
  EXPECT_LT(std::abs(log_zeta({2.0, 0.0}) - std::log(kPi * kPi / 6.0)), 1e-12);
  EXPECT_LT(std::abs(log_zeta({1.2, 0.0}) - std::log(zeta({1.2, 0.0}))), 1e-12);
}

TEST(LogZeta, FrozenReference) {
  EXPECT_LT(std::abs(log_zeta({0.75, 100.0}) - kLogZeta_075_100), 1e-11);
}

TEST(LogZeta, MatchesIntegratedArgOracle) {
  for (double t : {14.0, 21.5, 37.2, 250.0, 999.3}) {
    const cplx got = log_zeta({0.7, t});
    const cplx want = oracle::log_zeta_continued(0.7, t);
    EXPECT_LT(std::abs(got - want), 1e-9) << t;
  }
}

TEST(LogZeta, ExpLogIdentity) {
  EXPECT_LT(std::abs(std::exp(log_zeta({0.75, 33.7})) - zeta({0.75, 33.7})), 1e-9);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sig(0.55, 2.0), tt(-1000.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const ComplexPoint s{sig(rng), tt(rng)};
    EXPECT_LT(std::abs(std::exp(log_zeta(s)) - zeta(s)), 1e-9) << s.re << " " << s.im;
  }
}

TEST(LogZeta, ZeroOnPathNearFirstZero) {
  // First nontrivial zero at 1/2 + 14.1347...i; a generous guard trips there.
  EvalSettings s;
  s.zero_guard = 0.2;
  try {
    log_zeta({0.51, 14.134725141734693}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroOnPath);
  }
}

TEST(UnitPhase, MatchesReducedAngle) {
  EXPECT_EQ(unit_phase(123.0, 1), cplx(1.0, 0.0));
  const cplx z = unit_phase(1e5, 999983);
  EXPECT_NEAR(std::abs(z), 1.0, 1e-15);
  const long double ang = 1e5L * std::log(999983.0L);
  EXPECT_NEAR(z.real(), std::cos(ang), 1e-12);
  EXPECT_NEAR(z.imag(), -std::sin(ang), 1e-12);
}

std::vector<cplx> random_weights(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = cplx(d(rng), d(rng)) / std::sqrt(static_cast<double>(i + 1));
  return w;
}

// Direct evaluation at the exact grid abscissa t0 + m*step.
cplx direct_sum(const std::vector<cplx>& w, const GridSweep& g, std::int64_t m) {
  const long double t = static_cast<long double>(g.t0) +
                        static_cast<long double>(m) * static_cast<long double>(g.step);
  cplx s{0.0, 0.0};
  for (std::size_t n = 0; n < w.size(); ++n) {
    const long double ang = std::fmod(t * std::log(static_cast<long double>(n + 1)),
                                      2.0L * std::numbers::pi_v<long double>);
    s += w[n] * std::polar(1.0, -static_cast<double>(ang));
  }
  return s;
}

TEST(Sweep, UnitWeightGivesOnes) {
  const std::vector<cplx> w{1.0};
  const auto out = sweep_dirichlet_sums({100.0, 0.3, 50}, w);
  for (const auto& v : out) EXPECT_EQ(v, cplx(1.0, 0.0));
}

TEST(Sweep, SinglePointIsDirect) {
  const auto w = random_weights(500, 3);
  const auto out = sweep_dirichlet_sums({777.7, 0.05, 1}, w);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_LT(std::abs(out[0] - direct_sum(w, {777.7, 0.05, 1}, 0)), 1e-12);
}

TEST(Sweep, ThousandStepsMatchDirect) {
  const auto w = random_weights(800, 9);
  const GridSweep g{1e4, 0.05, 1000};
  const auto out = sweep_dirichlet_sums(g, w);
  double worst = 0.0;
  for (std::int64_t m = 0; m < g.count; ++m)
    worst = std::max(worst, std::abs(out[static_cast<std::size_t>(m)] - direct_sum(w, g, m)));
  EXPECT_LE(worst, 1e-10);
}

TEST(Sweep, HundredThousandStepsStayAccurate) {
  const auto w = random_weights(300, 10);
  const GridSweep g{1e5, 0.05, 100000};
  const auto out = sweep_dirichlet_sums(g, w);
  double worst = 0.0;
  for (std::int64_t m = 0; m < g.count; m += 37)
    worst = std::max(worst, std::abs(out[static_cast<std::size_t>(m)] - direct_sum(w, g, m)));
  worst = std::max(worst, std::abs(out.back() - direct_sum(w, g, g.count - 1)));
  EXPECT_LE(worst, 1e-10);
}

TEST(Sweep, IndependentOfWorkerCount) {
  const auto w = random_weights(200, 12);
  const GridSweep g{5000.0, 0.01, 3 * kSweepChunk + 17};
  set_worker_count(1);
  const auto a = sweep_dirichlet_sums(g, w);
  set_worker_count(4);
  const auto b = sweep_dirichlet_sums(g, w);
  set_worker_count(0);
  EXPECT_EQ(a, b);
}

TEST(GridZeta, MatchesPointwise) {
  const GridSweep g{1000.0, 0.37, 40};
  const std::vector<ComplexPoint> shifts{{0.75, 0.0}, {0.6, 0.1}, {1.5, -0.2}};
  GridZeta gz(g, shifts, {}, true);
  const auto mat = gz.matrix();
  for (std::size_t j = 0; j < shifts.size(); ++j)
    for (std::int64_t m = 0; m < g.count; m += 7) {
      const ComplexPoint s = shifts[j].shifted(g.at(m));
      EXPECT_LT(std::abs(mat[j][static_cast<std::size_t>(m)] - zeta(s)), 1e-11);
      EXPECT_LT(std::abs(mat[3 + j][static_cast<std::size_t>(m)] - zeta_prime(s)), 1e-10);
    }
}

TEST(LogZetaGrid, MatchesPointwiseAndReflects) {
  const GridSweep g{200.0, 0.25, 400};
  const std::vector<ComplexPoint> shifts{{0.75, 0.0}, {0.9, 0.05}};
  const auto lz = log_zeta_grid(g, shifts);
  for (std::size_t j = 0; j < shifts.size(); ++j)
    for (std::int64_t m = 0; m < g.count; m += 13) {
      if (lz.exceptional[static_cast<std::size_t>(m)]) continue;
      const ComplexPoint s = shifts[j].shifted(g.at(m));
      EXPECT_LT(std::abs(lz.values[j][static_cast<std::size_t>(m)] - log_zeta(s)), 1e-9);
    }
  // conjugate column: log zeta(conj(s) - it) = conj(log zeta(s + it))
  const GridSweep neg{-200.0 - 0.25 * 399, 0.25, 400};
  const auto lneg = log_zeta_grid(neg, {{0.75, 0.0}});
  for (std::int64_t m = 0; m < g.count; ++m) {
    const auto a = lz.values[0][static_cast<std::size_t>(m)];
    const auto b = lneg.values[0][static_cast<std::size_t>(g.count - 1 - m)];
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-10);
  }
}

TEST(LogZetaGrid, SinglePoint) {
  const auto lz = log_zeta_grid({100.0, 1.0, 1}, {{0.75, 0.0}});
  EXPECT_LT(std::abs(lz.values[0][0] - kLogZeta_075_100), 1e-11);
  EXPECT_EQ(lz.exceptional_fraction(), 0.0);
}

TEST(LogZetaGrid, FlagsPointsNearZeros) {
  EvalSettings s;
  s.zero_guard = 0.05;
  const GridSweep g{14.0, 0.01, 30};
  const auto lz = log_zeta_grid(g, {{0.51, 0.0}}, s);
  EXPECT_GT(lz.exceptional_fraction(), 0.0);
  EXPECT_LT(lz.exceptional_fraction(), 1.0);
}

}  // namespace
