#pragma once

// Random Euler product zeta(s, X) = prod_{p <= P} (1 - X(p) p^{-s})^{-1} with
// X(p) = exp(2 pi i u_p) independent and uniform on the unit circle.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "unilab/types.hpp"

namespace unilab {

/// Primes <= P, shared between samples with the same cutoff.
std::shared_ptr<const std::vector<std::int64_t>> prime_list(std::int64_t P);

/// 64-bit finalizer (splitmix64); the building block of the keyed generator.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// u_p for (seed, p): a keyed hash mapped to [0, 1) with 53 random bits.
double prime_angle(std::uint64_t seed, std::int64_t p) noexcept;

/// Seed of sample i in a Monte Carlo run with master seed `seed`.
std::uint64_t sample_seed(std::uint64_t seed, std::int64_t i) noexcept;

struct RandomSample {
  std::uint64_t seed = 0;
  std::int64_t P = 0;
  std::shared_ptr<const std::vector<std::int64_t>> primes;
  std::vector<double> u;           // per prime index
  std::vector<double> x_re, x_im;  // X(p) = cos 2 pi u + i sin 2 pi u

  std::size_t size() const { return u.size(); }
  cplx prime_value(std::size_t idx) const { return {x_re[idx], x_im[idx]}; }
  /// Index of prime p, or -1 when p is not a prime <= P.
  std::ptrdiff_t index_of(std::int64_t p) const;
};

RandomSample draw_sample(std::uint64_t seed, std::int64_t P);

/// Regenerates `sample` in place for another seed (same P), reusing storage.
void resample(RandomSample& sample, std::uint64_t seed);

/// Test hook: every angle 0, so X = 1 and zeta(s, X) is the truncated Euler product.
RandomSample degenerate_sample(std::int64_t P);

/// Fully multiplicative extension; X(1) = 1. Throws PrimeOutOfRange.
cplx multiplicative_value(const RandomSample& sample, std::int64_t n);

/// X(n) for 0 <= n <= N (entry 0 unused) by a multiplicative sieve; needs N <= P.
std::vector<cplx> multiplicative_table(const RandomSample& sample, std::int64_t N);

struct TailStats {
  double sigma = 0.0;
  std::int64_t P = 0;
  /// sqrt(P^{1-2 sigma} / ((2 sigma - 1) log P)), the std of sum_{p > P} X(p) p^{-s}.
  double main_tail_std = 0.0;
  /// Bound on the discarded non-linear parts sum_{p > P} |log(1 - w) + w|,
  /// w = X(p) p^{-s}, by sum_{p > P} p^{-2 sigma} / (1 - p^{-sigma}).
  double nonlinear_tail_bound = 0.0;
};

TailStats tail_stats(double sigma, std::int64_t P);

struct RandomLogZeta {
  cplx value;
  TailStats tail;
};

/// sum_{p <= P} -log(1 - X(p) p^{-s}), principal branch per factor.
RandomLogZeta random_log_zeta(const RandomSample& sample, ComplexPoint s);

/// exp(random_log_zeta).
cplx random_zeta(const RandomSample& sample, ComplexPoint s);

/// Bulk evaluation at a fixed set of points for many samples: the p^{-s_r}
/// table is built once and the per-sample work runs through the SIMD kernels.
class EulerRows {
 public:
  EulerRows(std::vector<ComplexPoint> points, std::int64_t P);

  std::size_t rows() const { return points_.size(); }
  std::int64_t P() const { return P_; }
  const std::vector<ComplexPoint>& points() const { return points_; }

  /// out[r] = log zeta_P(s_r, X).
  void log_zeta(const RandomSample& sample, std::span<cplx> out) const;
  /// zeta_P(s_r, X) and its s-derivative.
  void zeta(const RandomSample& sample, std::span<cplx> value, std::span<cplx> derivative) const;

 private:
  std::vector<ComplexPoint> points_;
  std::int64_t P_;
  std::size_t n_primes_;
  std::size_t head_;  // primes with some |p^{-s_r}| > kernel series radius
  std::vector<double> c_re_, c_im_;  // rows x n_primes, p^{-s_r}
  std::vector<double> log_p_;
};

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Samples per Monte Carlo chunk; partial sums are combined pairwise over
/// chunks, so results do not depend on the worker count.
inline constexpr std::int64_t kMcChunk = 256;

/// Vector-valued functional: writes `dim` values for one sample.
using SampleFunctional = std::function<void(const RandomSample&, std::span<double>)>;

/// Per-component mean and SE = sample std / sqrt(N) over samples
/// draw_sample(sample_seed(seed, i), P), i < N. Requires N >= 2.
std::vector<McResult> mc_expectation(const SampleFunctional& f, std::size_t dim, std::int64_t N,
                                     std::uint64_t seed, std::int64_t P);

McResult mc_expectation(const std::function<double(const RandomSample&)>& f, std::int64_t N,
                        std::uint64_t seed, std::int64_t P);

/// Persistence header only: angles are always regenerated from (seed, P).
nlohmann::json sample_header(const RandomSample& sample);
RandomSample sample_from_header(const nlohmann::json& header);

}  // namespace unilab
