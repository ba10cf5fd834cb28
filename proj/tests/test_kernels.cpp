#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "unilab/kernels.hpp"

namespace k = unilab::kernels;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool have_avx2() { return k::supported(k::Isa::Avx2); }

struct SweepCase {
  std::size_t rows, terms, steps;
};

class SweepEquivalence : public ::testing::TestWithParam<SweepCase> {};

TEST_P(SweepEquivalence, ScalarAndAvx2Agree) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2 on this host";
  const auto c = GetParam();
  const auto w_re = uniform(c.rows * c.terms, -1, 1, 1);
  const auto w_im = uniform(c.rows * c.terms, -1, 1, 2);
  const auto ang0 = uniform(c.terms, 0, 2 * std::numbers::pi, 3);
  const auto dang = uniform(c.terms, -0.3, 0.3, 4);
  std::vector<double> rot_re(c.terms), rot_im(c.terms), p0_re(c.terms), p0_im(c.terms);
  for (std::size_t n = 0; n < c.terms; ++n) {
    rot_re[n] = std::cos(dang[n]);
    rot_im[n] = std::sin(dang[n]);
    p0_re[n] = std::cos(ang0[n]);
    p0_im[n] = std::sin(ang0[n]);
  }
  auto run = [&](void (*fn)(const k::SweepArgs&), std::vector<double>& ph_re,
                 std::vector<double>& ph_im, std::vector<double>& o_re,
                 std::vector<double>& o_im) {
    ph_re = p0_re;
    ph_im = p0_im;
    o_re.assign(c.rows * c.steps, 0.0);
    o_im.assign(c.rows * c.steps, 0.0);
    k::SweepArgs a;
    a.rows = c.rows;
    a.terms = c.terms;
    a.steps = c.steps;
    a.w_re = w_re;
    a.w_im = w_im;
    a.phase_re = ph_re;
    a.phase_im = ph_im;
    a.rot_re = rot_re;
    a.rot_im = rot_im;
    a.out_re = o_re;
    a.out_im = o_im;
    fn(a);
  };
  std::vector<double> s_ph_re, s_ph_im, s_re, s_im, v_ph_re, v_ph_im, v_re, v_im;
  run(&k::scalar::sweep, s_ph_re, s_ph_im, s_re, s_im);
  run(&k::avx2::sweep, v_ph_re, v_ph_im, v_re, v_im);
  const double tol = 1e-12 * static_cast<double>(c.terms) * (1.0 + static_cast<double>(c.steps) / 100.0);
  for (std::size_t i = 0; i < s_re.size(); ++i) {
    ASSERT_NEAR(s_re[i], v_re[i], tol) << i;
    ASSERT_NEAR(s_im[i], v_im[i], tol) << i;
  }
  for (std::size_t n = 0; n < c.terms; ++n) {
    ASSERT_NEAR(s_ph_re[n], v_ph_re[n], 1e-12);
    ASSERT_NEAR(s_ph_im[n], v_ph_im[n], 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, SweepEquivalence,
                         ::testing::Values(SweepCase{1, 1, 1}, SweepCase{1, 7, 13},
                                           SweepCase{3, 300, 17}, SweepCase{5, 1000, 64},
                                           SweepCase{2, 257, 9}, SweepCase{9, 33, 100}));

TEST(Sweep, ScalarMatchesDirectProduct) {
  const std::size_t terms = 50, steps = 40;
  const auto dang = uniform(terms, -0.5, 0.5, 7);
  const auto w = uniform(terms, -1, 1, 8);
  std::vector<double> w_im(terms, 0.0), ph_re(terms, 1.0), ph_im(terms, 0.0);
  std::vector<double> rot_re(terms), rot_im(terms), o_re(steps), o_im(steps);
  for (std::size_t n = 0; n < terms; ++n) {
    rot_re[n] = std::cos(dang[n]);
    rot_im[n] = std::sin(dang[n]);
  }
  k::SweepArgs a;
  a.rows = 1;
  a.terms = terms;
  a.steps = steps;
  a.w_re = w;
  a.w_im = w_im;
  a.phase_re = ph_re;
  a.phase_im = ph_im;
  a.rot_re = rot_re;
  a.rot_im = rot_im;
  a.out_re = o_re;
  a.out_im = o_im;
  k::scalar::sweep(a);
  for (std::size_t m = 0; m < steps; ++m) {
    std::complex<double> want{0, 0};
    for (std::size_t n = 0; n < terms; ++n)
      want += w[n] * std::polar(1.0, static_cast<double>(m) * dang[n]);
    EXPECT_NEAR(o_re[m], want.real(), 1e-12);
    EXPECT_NEAR(o_im[m], want.imag(), 1e-12);
  }
}

struct Euler {
  std::size_t rows, primes;
  std::vector<double> x_re, x_im, c_re, c_im, log_p;
};

Euler make_euler(std::size_t rows, std::size_t primes, double radius, unsigned seed) {
  Euler e{rows, primes, {}, {}, {}, {}, {}};
  const auto ux = uniform(primes, 0, 1, seed);
  const auto mag = uniform(rows * primes, 0, radius, seed + 1);
  const auto arg = uniform(rows * primes, -3.14, 3.14, seed + 2);
  e.log_p = uniform(primes, 0.5, 12, seed + 3);
  for (std::size_t p = 0; p < primes; ++p) {
    e.x_re.push_back(std::cos(2 * std::numbers::pi * ux[p]));
    e.x_im.push_back(std::sin(2 * std::numbers::pi * ux[p]));
  }
  for (std::size_t i = 0; i < rows * primes; ++i) {
    e.c_re.push_back(mag[i] * std::cos(arg[i]));
    e.c_im.push_back(mag[i] * std::sin(arg[i]));
  }
  return e;
}

TEST(EulerLog, ScalarMatchesLibraryLog) {
  const auto e = make_euler(3, 101, k::kLogSeriesRadius, 11);
  std::vector<double> o_re(3), o_im(3);
  k::EulerLogArgs a{e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, o_re, o_im};
  k::scalar::euler_log(a);
  for (std::size_t r = 0; r < 3; ++r) {
    std::complex<double> want{0, 0};
    for (std::size_t p = 0; p < e.primes; ++p) {
      const std::complex<double> w = std::complex<double>(e.x_re[p], e.x_im[p]) *
                                     std::complex<double>(e.c_re[r * e.primes + p], e.c_im[r * e.primes + p]);
      want -= std::log(1.0 - w);
    }
    EXPECT_NEAR(o_re[r], want.real(), 1e-14 * 101);
    EXPECT_NEAR(o_im[r], want.imag(), 1e-14 * 101);
  }
}

TEST(EulerLog, ScalarAndAvx2Agree) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2 on this host";
  for (std::size_t primes : {1u, 3u, 4u, 5u, 64u, 1003u}) {
    const auto e = make_euler(4, primes, k::kLogSeriesRadius, 20 + static_cast<unsigned>(primes));
    std::vector<double> s_re(4), s_im(4), v_re(4), v_im(4);
    k::scalar::euler_log({e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, s_re, s_im});
    k::avx2::euler_log({e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, v_re, v_im});
    for (std::size_t r = 0; r < 4; ++r) {
      EXPECT_NEAR(s_re[r], v_re[r], 1e-15 * static_cast<double>(primes) + 1e-16);
      EXPECT_NEAR(s_im[r], v_im[r], 1e-15 * static_cast<double>(primes) + 1e-16);
    }
  }
}

TEST(EulerProduct, ScalarAndAvx2Agree) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2 on this host";
  for (std::size_t primes : {1u, 2u, 7u, 8u, 500u}) {
    const auto e = make_euler(3, primes, 0.7, 40 + static_cast<unsigned>(primes));
    std::vector<double> sp_re(3), sp_im(3), sd_re(3), sd_im(3);
    std::vector<double> vp_re(3), vp_im(3), vd_re(3), vd_im(3);
    k::scalar::euler_product({e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, e.log_p,
                              sp_re, sp_im, sd_re, sd_im});
    k::avx2::euler_product({e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, e.log_p,
                            vp_re, vp_im, vd_re, vd_im});
    for (std::size_t r = 0; r < 3; ++r) {
      const std::complex<double> sp{sp_re[r], sp_im[r]}, vp{vp_re[r], vp_im[r]};
      const std::complex<double> sd{sd_re[r], sd_im[r]}, vd{vd_re[r], vd_im[r]};
      EXPECT_LE(std::abs(sp - vp), 1e-13 * static_cast<double>(primes) * std::abs(sp));
      EXPECT_LE(std::abs(sd - vd), 1e-13 * static_cast<double>(primes) * (1 + std::abs(sd)));
    }
  }
}

TEST(EulerProduct, ScalarMatchesDefinition) {
  const auto e = make_euler(2, 30, 0.5, 77);
  std::vector<double> p_re(2), p_im(2), d_re(2), d_im(2);
  k::scalar::euler_product({e.rows, e.primes, e.x_re, e.x_im, e.c_re, e.c_im, e.log_p,
                            p_re, p_im, d_re, d_im});
  for (std::size_t r = 0; r < 2; ++r) {
    std::complex<double> prod{1, 0}, dsum{0, 0};
    for (std::size_t p = 0; p < e.primes; ++p) {
      const std::complex<double> w = std::complex<double>(e.x_re[p], e.x_im[p]) *
                                     std::complex<double>(e.c_re[r * 30 + p], e.c_im[r * 30 + p]);
      prod *= 1.0 - w;
      dsum += w * e.log_p[p] / (1.0 - w);
    }
    EXPECT_NEAR(p_re[r], prod.real(), 1e-13);
    EXPECT_NEAR(p_im[r], prod.imag(), 1e-13);
    EXPECT_NEAR(d_re[r], dsum.real(), 1e-12);
    EXPECT_NEAR(d_im[r], dsum.imag(), 1e-12);
  }
}

TEST(UnitCircle, VariantsMatchLibm) {
  auto u = uniform(1003, 0, 1, 99);
  u.push_back(0.0);
  u.push_back(0.25);
  u.push_back(0.5);
  u.push_back(0.75);
  u.push_back(std::nextafter(1.0, 0.0));
  std::vector<double> c(u.size()), s(u.size());
  for (const auto* t : {&k::table(k::Isa::Scalar), &k::table(k::Isa::Avx2)}) {
    if (t->isa == k::Isa::Avx2 && !have_avx2()) continue;
    t->unit_circle({u, c, s});
    for (std::size_t i = 0; i < u.size(); ++i) {
      EXPECT_NEAR(c[i], std::cos(2 * std::numbers::pi * u[i]), 2e-15) << t->name << " u=" << u[i];
      EXPECT_NEAR(s[i], std::sin(2 * std::numbers::pi * u[i]), 2e-15) << t->name << " u=" << u[i];
      EXPECT_NEAR(c[i] * c[i] + s[i] * s[i], 1.0, 4e-16);
    }
  }
}

TEST(Dispatch, ActiveTableIsSupported) {
  const auto& t = k::active();
  EXPECT_TRUE(k::supported(t.isa));
  EXPECT_TRUE(k::supported(k::Isa::Scalar));
  EXPECT_EQ(k::table(k::Isa::Scalar).name, "scalar");
}

}  // namespace
