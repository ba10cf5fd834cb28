#include "unilab/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "unilab/dirichlet_approx.hpp"
#include "unilab/error.hpp"
#include "unilab/kernels.hpp"
#include "unilab/parallel.hpp"
#include "unilab/zeta_eval.hpp"

namespace unilab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSampleStride = 0xD1B54A32D192ED03ULL;

void fill_unit_circle(RandomSample& s) {
  s.x_re.resize(s.u.size());
  s.x_im.resize(s.u.size());
  kernels::active().unit_circle({s.u, s.x_re, s.x_im});
}

cplx p_pow_neg(ComplexPoint s, std::int64_t p) {
  return std::exp(-s.re * std::log(static_cast<double>(p))) * unit_phase(s.im, p);
}

}  // namespace

std::shared_ptr<const std::vector<std::int64_t>> prime_list(std::int64_t P) {
  require(P >= 2, "prime cutoff P must be >= 2");
  static std::mutex mu;
  static std::map<std::int64_t, std::shared_ptr<const std::vector<std::int64_t>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[P];
  if (!slot) slot = std::make_shared<const std::vector<std::int64_t>>(primes_up_to(P));
  return slot;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double prime_angle(std::uint64_t seed, std::int64_t p) noexcept {
  // position p of the splitmix64 stream whose state is keyed by seed
  const std::uint64_t h = mix64(mix64(seed) + static_cast<std::uint64_t>(p) * kGolden);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t sample_seed(std::uint64_t seed, std::int64_t i) noexcept {
  return mix64(seed + static_cast<std::uint64_t>(i + 1) * kSampleStride);
}

std::ptrdiff_t RandomSample::index_of(std::int64_t p) const {
  const auto& ps = *primes;
  const auto it = std::lower_bound(ps.begin(), ps.end(), p);
  if (it == ps.end() || *it != p) return -1;
  return it - ps.begin();
}

void resample(RandomSample& sample, std::uint64_t seed) {
  sample.seed = seed;
  const auto& ps = *sample.primes;
  sample.u.resize(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) sample.u[i] = prime_angle(seed, ps[i]);
  fill_unit_circle(sample);
}

RandomSample draw_sample(std::uint64_t seed, std::int64_t P) {
  RandomSample s;
  s.P = P;
  s.primes = prime_list(P);
  resample(s, seed);
  return s;
}

RandomSample degenerate_sample(std::int64_t P) {
  RandomSample s;
  s.P = P;
  s.primes = prime_list(P);
  s.u.assign(s.primes->size(), 0.0);
  s.x_re.assign(s.u.size(), 1.0);
  s.x_im.assign(s.u.size(), 0.0);
  return s;
}

cplx multiplicative_value(const RandomSample& sample, std::int64_t n) {
  require(n >= 1, "multiplicative_value: n must be positive");
  cplx out{1.0, 0.0};
  std::int64_t m = n;
  const auto& ps = *sample.primes;
  for (std::size_t i = 0; i < ps.size() && m > 1; ++i) {
    const std::int64_t p = ps[i];
    if (p > m / p) break;
    while (m % p == 0) {
      out *= sample.prime_value(i);
      m /= p;
    }
  }
  if (m > 1) {
    const auto idx = sample.index_of(m);
    if (idx < 0)
      fail(ErrorCode::PrimeOutOfRange, "multiplicative_value: " + std::to_string(n) + " has a prime factor above P = " +
                                           std::to_string(sample.P));
    out *= sample.prime_value(static_cast<std::size_t>(idx));
  }
  return out;
}

std::vector<cplx> multiplicative_table(const RandomSample& sample, std::int64_t N) {
  require(N >= 1, "multiplicative_table: N must be positive");
  if (N > sample.P) fail(ErrorCode::PrimeOutOfRange, "multiplicative_table: N exceeds the prime cutoff");
  const auto n = static_cast<std::size_t>(N);
  std::vector<std::int32_t> spf(n + 1, 0);  // smallest prime factor index + 1
  const auto& ps = *sample.primes;
  for (std::size_t i = 0; i < ps.size() && ps[i] <= N; ++i)
    for (auto m = static_cast<std::size_t>(ps[i]); m <= n; m += static_cast<std::size_t>(ps[i]))
      if (spf[m] == 0) spf[m] = static_cast<std::int32_t>(i + 1);
  std::vector<cplx> out(n + 1, cplx{0.0, 0.0});
  out[1] = 1.0;
  for (std::size_t m = 2; m <= n; ++m) {
    const auto i = static_cast<std::size_t>(spf[m] - 1);
    out[m] = sample.prime_value(i) * out[m / static_cast<std::size_t>(ps[i])];
  }
  return out;
}

TailStats tail_stats(double sigma, std::int64_t P) {
  require(sigma > 0.5, "tail_stats: requires sigma > 1/2");
  require(P >= 2, "tail_stats: requires P >= 2");
  const double p = static_cast<double>(P);
  const double lp = std::log(p);
  const double a = 2.0 * sigma - 1.0;
  TailStats t;
  t.sigma = sigma;
  t.P = P;
  t.main_tail_std = std::sqrt(std::pow(p, -a) / (a * lp));
  // sum_{p > P} p^{-2 sigma} <= 1.04 P^{1-2 sigma} / log P * 2 sigma / (2 sigma - 1),
  // by parts against theta(u) <= psi(u) < 1.04 u.
  const double sq = 1.04 * std::pow(p, -a) / lp * (2.0 * sigma) / a;
  t.nonlinear_tail_bound = sq / (1.0 - std::pow(p, -sigma));
  return t;
}

RandomLogZeta random_log_zeta(const RandomSample& sample, ComplexPoint s) {
  require(s.finite() && s.re > 0.5, "random_log_zeta: requires Re(s) > 1/2");
  const auto& ps = *sample.primes;
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < ps.size(); ++i)
    sum -= std::log(1.0 - sample.prime_value(i) * p_pow_neg(s, ps[i]));
  return {sum, tail_stats(s.re, sample.P)};
}

cplx random_zeta(const RandomSample& sample, ComplexPoint s) {
  return std::exp(random_log_zeta(sample, s).value);
}

EulerRows::EulerRows(std::vector<ComplexPoint> points, std::int64_t P)
    : points_(std::move(points)), P_(P), n_primes_(0), head_(0) {
  require(!points_.empty(), "EulerRows: at least one point required");
  const auto primes = prime_list(P);
  n_primes_ = primes->size();
  double sigma_min = points_.front().re;
  for (const auto& s : points_) {
    require(s.finite() && s.re > 0.5, "EulerRows: points need Re(s) > 1/2");
    sigma_min = std::min(sigma_min, s.re);
  }
  while (head_ < n_primes_ &&
         std::pow(static_cast<double>((*primes)[head_]), -sigma_min) > kernels::kLogSeriesRadius)
    ++head_;
  c_re_.resize(rows() * n_primes_);
  c_im_.resize(rows() * n_primes_);
  log_p_.resize(n_primes_);
  for (std::size_t i = 0; i < n_primes_; ++i) log_p_[i] = std::log(static_cast<double>((*primes)[i]));
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t i = 0; i < n_primes_; ++i) {
      const cplx c = p_pow_neg(points_[r], (*primes)[i]);
      c_re_[r * n_primes_ + i] = c.real();
      c_im_[r * n_primes_ + i] = c.imag();
    }
}

void EulerRows::log_zeta(const RandomSample& sample, std::span<cplx> out) const {
  require(sample.P == P_ && out.size() == rows(), "EulerRows::log_zeta: shape mismatch");
  const auto& k = kernels::active();
  const std::size_t tail = n_primes_ - head_;
  const std::span<const double> x_re(sample.x_re), x_im(sample.x_im);
  for (std::size_t r = 0; r < rows(); ++r) {
    cplx head_sum{0.0, 0.0};
    for (std::size_t i = 0; i < head_; ++i) {
      const cplx c{c_re_[r * n_primes_ + i], c_im_[r * n_primes_ + i]};
      head_sum -= std::log(1.0 - sample.prime_value(i) * c);
    }
    double t_re = 0.0, t_im = 0.0;
    if (tail > 0) {
      kernels::EulerLogArgs a;
      a.rows = 1;
      a.primes = tail;
      a.x_re = x_re.subspan(head_);
      a.x_im = x_im.subspan(head_);
      a.c_re = std::span<const double>(c_re_).subspan(r * n_primes_ + head_, tail);
      a.c_im = std::span<const double>(c_im_).subspan(r * n_primes_ + head_, tail);
      a.out_re = std::span<double>(&t_re, 1);
      a.out_im = std::span<double>(&t_im, 1);
      k.euler_log(a);
    }
    out[r] = head_sum + cplx{t_re, t_im};
  }
}

void EulerRows::zeta(const RandomSample& sample, std::span<cplx> value,
                     std::span<cplx> derivative) const {
  require(sample.P == P_ && value.size() == rows() && derivative.size() == rows(),
          "EulerRows::zeta: shape mismatch");
  std::vector<double> pr(rows()), pi(rows()), dr(rows()), di(rows());
  kernels::EulerProductArgs a;
  a.rows = rows();
  a.primes = n_primes_;
  a.x_re = sample.x_re;
  a.x_im = sample.x_im;
  a.c_re = c_re_;
  a.c_im = c_im_;
  a.log_p = log_p_;
  a.prod_re = pr;
  a.prod_im = pi;
  a.dsum_re = dr;
  a.dsum_im = di;
  kernels::active().euler_product(a);
  for (std::size_t r = 0; r < rows(); ++r) {
    const cplx z = 1.0 / cplx{pr[r], pi[r]};
    value[r] = z;
    derivative[r] = -z * cplx{dr[r], di[r]};
  }
}

std::vector<McResult> mc_expectation(const SampleFunctional& f, std::size_t dim, std::int64_t N,
                                     std::uint64_t seed, std::int64_t P) {
  require(N >= 2, "mc_expectation: N >= 2 required for a standard error");
  require(dim >= 1, "mc_expectation: dim must be positive");
  // Shift by the first sample's values: exact for constant functionals and
  // free of cancellation in the variance.
  std::vector<double> shift(dim);
  f(draw_sample(sample_seed(seed, 0), P), shift);

  const std::int64_t n_chunks = (N + kMcChunk - 1) / kMcChunk;
  std::vector<double> s1(static_cast<std::size_t>(n_chunks) * dim, 0.0);
  std::vector<double> s2(s1.size(), 0.0);
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    const std::int64_t i0 = c * kMcChunk;
    const std::int64_t i1 = std::min(N, i0 + kMcChunk);
    RandomSample sample = draw_sample(sample_seed(seed, i0), P);
    std::vector<double> v(dim);
    double* a1 = s1.data() + static_cast<std::size_t>(c) * dim;
    double* a2 = s2.data() + static_cast<std::size_t>(c) * dim;
    for (std::int64_t i = i0; i < i1; ++i) {
      if (i > i0) resample(sample, sample_seed(seed, i));
      f(sample, v);
      for (std::size_t d = 0; d < dim; ++d) {
        const double y = v[d] - shift[d];
        a1[d] += y;
        a2[d] += y * y;
      }
    }
  });

  std::vector<McResult> out(dim);
  std::vector<double> col1(static_cast<std::size_t>(n_chunks)), col2(col1.size());
  const double n = static_cast<double>(N);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t c = 0; c < col1.size(); ++c) {
      col1[c] = s1[c * dim + d];
      col2[c] = s2[c * dim + d];
    }
    const double t1 = pairwise_sum(col1);
    const double t2 = pairwise_sum(col2);
    const double var = std::max(0.0, (t2 - t1 * t1 / n) / (n - 1.0));
    out[d].mean = shift[d] + t1 / n;
    out[d].std_error = std::sqrt(var / n);
  }
  return out;
}

McResult mc_expectation(const std::function<double(const RandomSample&)>& f, std::int64_t N,
                        std::uint64_t seed, std::int64_t P) {
  return mc_expectation([&](const RandomSample& s, std::span<double> out) { out[0] = f(s); }, 1,
                        N, seed, P)[0];
}

nlohmann::json sample_header(const RandomSample& sample) {
  return {{"seed", sample.seed}, {"P", sample.P}};
}

RandomSample sample_from_header(const nlohmann::json& header) {
  if (!header.is_object() || !header.contains("seed") || !header.contains("P"))
    fail(ErrorCode::Validation, "sample header needs fields seed and P");
  return draw_sample(header.at("seed").get<std::uint64_t>(), header.at("P").get<std::int64_t>());
}

}  // namespace unilab
