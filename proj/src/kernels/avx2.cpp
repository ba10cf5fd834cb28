// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after kernels::supported(Isa::Avx2) returned true.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "unilab/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define UNILAB_HAVE_AVX2 1
#endif

namespace unilab::kernels::avx2 {

#if UNILAB_HAVE_AVX2

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hprod_re_im(__m256d re, __m256d im, double& out_im) {
  alignas(32) double r[4];
  alignas(32) double i[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(i, im);
  std::complex<double> acc{r[0], i[0]};
  for (int k = 1; k < 4; ++k) acc *= std::complex<double>{r[k], i[k]};
  out_im = acc.imag();
  return acc.real();
}

// (ar + i ai) * (br + i bi)
inline void cmul(__m256d ar, __m256d ai, __m256d br, __m256d bi, __m256d& cr,
                 __m256d& ci) {
  cr = _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi));
  ci = _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br));
}

constexpr std::size_t kTile = 256;
constexpr std::size_t kBlock = 8;

}  // namespace

void sweep(const SweepArgs& a) {
  alignas(32) double zr[kBlock][kTile];
  alignas(32) double zi[kBlock][kTile];

  for (std::size_t m0 = 0; m0 < a.steps; m0 += kBlock) {
    const std::size_t nb = std::min(kBlock, a.steps - m0);
    for (std::size_t r = 0; r < a.rows; ++r) {
      for (std::size_t b = 0; b < nb; ++b) {
        a.out_re[r * a.steps + m0 + b] = 0.0;
        a.out_im[r * a.steps + m0 + b] = 0.0;
      }
    }

    for (std::size_t n0 = 0; n0 < a.terms; n0 += kTile) {
      const std::size_t nt = std::min(kTile, a.terms - n0);
      double* ph_re = a.phase_re.data() + n0;
      double* ph_im = a.phase_im.data() + n0;
      const double* rot_re = a.rot_re.data() + n0;
      const double* rot_im = a.rot_im.data() + n0;

      // Phase block: zr[b][n] = z_{n0+n}(m0+b), then advance by nb steps.
      std::size_t n = 0;
      for (; n + 4 <= nt; n += 4) {
        __m256d pr = _mm256_loadu_pd(ph_re + n);
        __m256d pi = _mm256_loadu_pd(ph_im + n);
        const __m256d rr = _mm256_loadu_pd(rot_re + n);
        const __m256d ri = _mm256_loadu_pd(rot_im + n);
        for (std::size_t b = 0; b < nb; ++b) {
          _mm256_store_pd(&zr[b][n], pr);
          _mm256_store_pd(&zi[b][n], pi);
          __m256d nr, ni;
          cmul(pr, pi, rr, ri, nr, ni);
          pr = nr;
          pi = ni;
        }
        _mm256_storeu_pd(ph_re + n, pr);
        _mm256_storeu_pd(ph_im + n, pi);
      }
      for (; n < nt; ++n) {
        double pr = ph_re[n];
        double pi = ph_im[n];
        for (std::size_t b = 0; b < nb; ++b) {
          zr[b][n] = pr;
          zi[b][n] = pi;
          const double nr = std::fma(pr, rot_re[n], -pi * rot_im[n]);
          const double ni = std::fma(pr, rot_im[n], pi * rot_re[n]);
          pr = nr;
          pi = ni;
        }
        ph_re[n] = pr;
        ph_im[n] = pi;
      }

      const std::size_t nv = nt & ~std::size_t{3};
      for (std::size_t r = 0; r < a.rows; ++r) {
        const double* wr = a.w_re.data() + r * a.terms + n0;
        const double* wi = a.w_im.data() + r * a.terms + n0;
        double* out_re = a.out_re.data() + r * a.steps + m0;
        double* out_im = a.out_im.data() + r * a.steps + m0;

        std::size_t b = 0;
        for (; b + 4 <= nb; b += 4) {
          __m256d ar0 = _mm256_setzero_pd(), ai0 = _mm256_setzero_pd();
          __m256d ar1 = _mm256_setzero_pd(), ai1 = _mm256_setzero_pd();
          __m256d ar2 = _mm256_setzero_pd(), ai2 = _mm256_setzero_pd();
          __m256d ar3 = _mm256_setzero_pd(), ai3 = _mm256_setzero_pd();
          for (std::size_t k = 0; k < nv; k += 4) {
            const __m256d xr = _mm256_loadu_pd(wr + k);
            const __m256d xi = _mm256_loadu_pd(wi + k);
            const __m256d nxi = _mm256_sub_pd(_mm256_setzero_pd(), xi);
#define UNILAB_ACC(q)                                        \
  {                                                          \
    const __m256d yr = _mm256_load_pd(&zr[b + q][k]);        \
    const __m256d yi = _mm256_load_pd(&zi[b + q][k]);        \
    ar##q = _mm256_fmadd_pd(xr, yr, ar##q);                  \
    ar##q = _mm256_fmadd_pd(nxi, yi, ar##q);                 \
    ai##q = _mm256_fmadd_pd(xr, yi, ai##q);                  \
    ai##q = _mm256_fmadd_pd(xi, yr, ai##q);                  \
  }
            UNILAB_ACC(0)
            UNILAB_ACC(1)
            UNILAB_ACC(2)
            UNILAB_ACC(3)
#undef UNILAB_ACC
          }
          double sr[4] = {hsum(ar0), hsum(ar1), hsum(ar2), hsum(ar3)};
          double si[4] = {hsum(ai0), hsum(ai1), hsum(ai2), hsum(ai3)};
          for (std::size_t k = nv; k < nt; ++k) {
            for (std::size_t q = 0; q < 4; ++q) {
              sr[q] += wr[k] * zr[b + q][k] - wi[k] * zi[b + q][k];
              si[q] += wr[k] * zi[b + q][k] + wi[k] * zr[b + q][k];
            }
          }
          for (std::size_t q = 0; q < 4; ++q) {
            out_re[b + q] += sr[q];
            out_im[b + q] += si[q];
          }
        }
        for (; b < nb; ++b) {
          __m256d ar = _mm256_setzero_pd(), ai = _mm256_setzero_pd();
          for (std::size_t k = 0; k < nv; k += 4) {
            const __m256d xr = _mm256_loadu_pd(wr + k);
            const __m256d xi = _mm256_loadu_pd(wi + k);
            const __m256d yr = _mm256_load_pd(&zr[b][k]);
            const __m256d yi = _mm256_load_pd(&zi[b][k]);
            ar = _mm256_fmadd_pd(xr, yr, ar);
            ar = _mm256_fnmadd_pd(xi, yi, ar);
            ai = _mm256_fmadd_pd(xr, yi, ai);
            ai = _mm256_fmadd_pd(xi, yr, ai);
          }
          double sr = hsum(ar);
          double si = hsum(ai);
          for (std::size_t k = nv; k < nt; ++k) {
            sr += wr[k] * zr[b][k] - wi[k] * zi[b][k];
            si += wr[k] * zi[b][k] + wi[k] * zr[b][k];
          }
          out_re[b] += sr;
          out_im[b] += si;
        }
      }
    }
  }
}

void euler_log(const EulerLogArgs& a) {
  const std::size_t pv = a.primes & ~std::size_t{3};
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* cr = a.c_re.data() + r * a.primes;
    const double* ci = a.c_im.data() + r * a.primes;
    __m256d sr = _mm256_setzero_pd();
    __m256d si = _mm256_setzero_pd();
    for (std::size_t p = 0; p < pv; p += 4) {
      __m256d wr, wi;
      cmul(_mm256_loadu_pd(a.x_re.data() + p), _mm256_loadu_pd(a.x_im.data() + p),
           _mm256_loadu_pd(cr + p), _mm256_loadu_pd(ci + p), wr, wi);
      __m256d hr = _mm256_set1_pd(1.0 / kLogSeriesTerms);
      __m256d hi = _mm256_setzero_pd();
      for (int k = kLogSeriesTerms - 1; k >= 1; --k) {
        __m256d tr, ti;
        cmul(hr, hi, wr, wi, tr, ti);
        hr = _mm256_add_pd(tr, _mm256_set1_pd(1.0 / k));
        hi = ti;
      }
      __m256d tr, ti;
      cmul(hr, hi, wr, wi, tr, ti);
      sr = _mm256_add_pd(sr, tr);
      si = _mm256_add_pd(si, ti);
    }
    double out_r = hsum(sr);
    double out_i = hsum(si);
    for (std::size_t p = pv; p < a.primes; ++p) {
      const std::complex<double> w =
          std::complex<double>{a.x_re[p], a.x_im[p]} * std::complex<double>{cr[p], ci[p]};
      std::complex<double> h{1.0 / kLogSeriesTerms, 0.0};
      for (int k = kLogSeriesTerms - 1; k >= 1; --k) h = h * w + 1.0 / k;
      h *= w;
      out_r += h.real();
      out_i += h.imag();
    }
    a.out_re[r] = out_r;
    a.out_im[r] = out_i;
  }
}

void euler_product(const EulerProductArgs& a) {
  const std::size_t pv = a.primes & ~std::size_t{3};
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* cr = a.c_re.data() + r * a.primes;
    const double* ci = a.c_im.data() + r * a.primes;
    __m256d pr = one;
    __m256d pim = _mm256_setzero_pd();
    __m256d dr = _mm256_setzero_pd();
    __m256d di = _mm256_setzero_pd();
    for (std::size_t p = 0; p < pv; p += 4) {
      __m256d wr, wi;
      cmul(_mm256_loadu_pd(a.x_re.data() + p), _mm256_loadu_pd(a.x_im.data() + p),
           _mm256_loadu_pd(cr + p), _mm256_loadu_pd(ci + p), wr, wi);
      const __m256d er = _mm256_sub_pd(one, wr);
      const __m256d ei = _mm256_sub_pd(_mm256_setzero_pd(), wi);
      __m256d nr, ni;
      cmul(pr, pim, er, ei, nr, ni);
      pr = nr;
      pim = ni;
      // w * log p / e = w * log p * conj(e) / |e|^2
      const __m256d scale = _mm256_div_pd(
          _mm256_loadu_pd(a.log_p.data() + p),
          _mm256_fmadd_pd(er, er, _mm256_mul_pd(ei, ei)));
      __m256d qr, qi;
      cmul(wr, wi, er, _mm256_sub_pd(_mm256_setzero_pd(), ei), qr, qi);
      dr = _mm256_fmadd_pd(qr, scale, dr);
      di = _mm256_fmadd_pd(qi, scale, di);
    }
    double prod_i = 0.0;
    double prod_r = hprod_re_im(pr, pim, prod_i);
    std::complex<double> prod{prod_r, prod_i};
    std::complex<double> dsum{hsum(dr), hsum(di)};
    for (std::size_t p = pv; p < a.primes; ++p) {
      const std::complex<double> w =
          std::complex<double>{a.x_re[p], a.x_im[p]} * std::complex<double>{cr[p], ci[p]};
      const std::complex<double> e = 1.0 - w;
      prod *= e;
      dsum += w * a.log_p[p] / e;
    }
    a.prod_re[r] = prod.real();
    a.prod_im[r] = prod.imag();
    a.dsum_re[r] = dsum.real();
    a.dsum_im[r] = dsum.imag();
  }
}

namespace {

// Taylor coefficients of sin and cos in theta^2, |theta| <= pi/4.
constexpr double kSin[] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
};
constexpr double kCos[] = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
};

}  // namespace

void unit_circle(const UnitCircleArgs& a) {
  const std::size_t n = a.u.size();
  const std::size_t nv = n & ~std::size_t{3};
  const __m256d two_pi = _mm256_set1_pd(2.0 * std::numbers::pi);
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

  for (std::size_t i = 0; i < nv; i += 4) {
    const __m256d u = _mm256_loadu_pd(a.u.data() + i);
    const __m256d x = _mm256_sub_pd(u, _mm256_round_pd(u, kRound));
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, four), kRound);
    const __m256d y = _mm256_fnmadd_pd(q, quarter, x);
    const __m256d th = _mm256_mul_pd(y, two_pi);
    const __m256d t2 = _mm256_mul_pd(th, th);

    __m256d s = _mm256_set1_pd(kSin[7]);
    for (int k = 6; k >= 0; --k) s = _mm256_fmadd_pd(s, t2, _mm256_set1_pd(kSin[k]));
    s = _mm256_mul_pd(s, th);
    __m256d c = _mm256_set1_pd(kCos[8]);
    for (int k = 7; k >= 0; --k) c = _mm256_fmadd_pd(c, t2, _mm256_set1_pd(kCos[k]));

    // quadrant qm = q mod 4 in {0,1,2,3}
    const __m256d qm = _mm256_sub_pd(
        q, _mm256_mul_pd(four, _mm256_floor_pd(_mm256_mul_pd(q, quarter))));
    const __m256d odd = _mm256_or_pd(_mm256_cmp_pd(qm, one, _CMP_EQ_OQ),
                                     _mm256_cmp_pd(qm, three, _CMP_EQ_OQ));
    const __m256d cos_neg = _mm256_or_pd(_mm256_cmp_pd(qm, one, _CMP_EQ_OQ),
                                         _mm256_cmp_pd(qm, two, _CMP_EQ_OQ));
    const __m256d sin_neg = _mm256_cmp_pd(qm, two, _CMP_GE_OQ);
    __m256d co = _mm256_blendv_pd(c, s, odd);
    __m256d si = _mm256_blendv_pd(s, c, odd);
    co = _mm256_xor_pd(co, _mm256_and_pd(cos_neg, sign));
    si = _mm256_xor_pd(si, _mm256_and_pd(sin_neg, sign));
    _mm256_storeu_pd(a.cos_out.data() + i, co);
    _mm256_storeu_pd(a.sin_out.data() + i, si);
  }
  for (std::size_t i = nv; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * a.u[i];
    a.cos_out[i] = std::cos(th);
    a.sin_out[i] = std::sin(th);
  }
}

#else  // !UNILAB_HAVE_AVX2

void sweep(const SweepArgs& a) { scalar::sweep(a); }
void euler_log(const EulerLogArgs& a) { scalar::euler_log(a); }
void euler_product(const EulerProductArgs& a) { scalar::euler_product(a); }
void unit_circle(const UnitCircleArgs& a) { scalar::unit_circle(a); }

#endif

}  // namespace unilab::kernels::avx2
