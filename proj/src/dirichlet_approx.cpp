#include "unilab/dirichlet_approx.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "unilab/error.hpp"

namespace unilab {

namespace {

constexpr std::array<char, 8> kMagic = {'U', 'N', 'L', 'B', 'M', 'G', 'T', 'B'};

struct CacheHeader {
  std::array<char, 8> magic;
  std::uint32_t version;
  std::uint32_t reserved;
  std::int64_t limit;
};

cplx pow_neg(ComplexPoint s, std::int64_t n) {
  return std::exp(-s.re * std::log(static_cast<double>(n))) * unit_phase(s.im, n);
}

MangoldtTable sieve(std::int64_t limit) {
  MangoldtTable t;
  t.limit = limit;
  t.lambda.assign(static_cast<std::size_t>(limit) + 1, 0.0);
  for (std::int64_t p : primes_up_to(limit)) {
    const double lp = std::log(static_cast<double>(p));
    for (std::int64_t q = p; q <= limit; q *= p) {
      t.lambda[static_cast<std::size_t>(q)] = lp;
      if (q > limit / p) break;
    }
  }
  return t;
}

std::optional<MangoldtTable> load_cache(const std::filesystem::path& file, std::int64_t limit) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  CacheHeader h{};
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || h.magic != kMagic || h.version != kMangoldtCacheVersion || h.limit != limit)
    return std::nullopt;
  MangoldtTable t;
  t.limit = limit;
  t.lambda.resize(static_cast<std::size_t>(limit) + 1);
  in.read(reinterpret_cast<char*>(t.lambda.data()),
          static_cast<std::streamsize>(t.lambda.size() * sizeof(double)));
  if (!in || in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  return t;
}

void store_cache(const std::filesystem::path& file, const MangoldtTable& t) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  const auto tmp = file.string() + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&t));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;  // cache is best effort
    CacheHeader h{kMagic, kMangoldtCacheVersion, 0, t.limit};
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(t.lambda.data()),
              static_cast<std::streamsize>(t.lambda.size() * sizeof(double)));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp, ec);
      return;
    }
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

// Prime powers q <= x with a(q) = Lambda(q) / log q * q^{-s}.
struct SparseSeries {
  std::vector<std::int64_t> n;
  std::vector<cplx> a;
};

SparseSeries mangoldt_series(ComplexPoint s, std::int64_t x, const MangoldtTable& table) {
  SparseSeries out;
  for (std::int64_t q = 2; q <= x; ++q) {
    const double lam = table(q);
    if (lam == 0.0) continue;
    out.n.push_back(q);
    out.a.push_back(lam / std::log(static_cast<double>(q)) * pow_neg(s, q));
  }
  return out;
}

void check_table(std::int64_t x, const MangoldtTable& table) {
  if (x > table.limit)
    fail(ErrorCode::TableTooSmall, "Mangoldt table limit " + std::to_string(table.limit) +
                                       " below requested " + std::to_string(x));
}

}  // namespace

std::optional<std::filesystem::path> resolve_cache_dir(const TableOptions& options) {
  if (const char* env = std::getenv("UNILAB_CACHE"); env != nullptr && *env != '\0')
    return std::filesystem::path(env);
  return options.cache_dir;
}

std::filesystem::path mangoldt_cache_file(const std::filesystem::path& dir, std::int64_t limit) {
  return dir / ("mangoldt_" + std::to_string(limit) + ".bin");
}

std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
  std::vector<std::int64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t p = 2; p <= limit; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    primes.push_back(p);
    if (p > limit / p) continue;
    for (std::int64_t m = p * p; m <= limit; m += p) composite[static_cast<std::size_t>(m)] = true;
  }
  return primes;
}

MangoldtTable build_mangoldt(std::int64_t limit, const TableOptions& options) {
  require(limit >= 2, "build_mangoldt: limit must be >= 2");
  if (limit > options.max_limit)
    fail(ErrorCode::InvalidArgument, "build_mangoldt: limit " + std::to_string(limit) +
                                         " exceeds configured cap " +
                                         std::to_string(options.max_limit));
  const auto dir = resolve_cache_dir(options);
  if (dir) {
    const auto file = mangoldt_cache_file(*dir, limit);
    if (auto cached = load_cache(file, limit)) return std::move(*cached);
    MangoldtTable t = sieve(limit);
    store_cache(file, t);
    return t;
  }
  return sieve(limit);
}

double ShiftVector::sigma0() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : shifts) m = std::min(m, s.re);
  return m;
}

void ShiftVector::validate() const {
  require(!shifts.empty(), "ShiftVector: at least one shift required");
  for (const auto& s : shifts) {
    require(s.finite(), "ShiftVector: non-finite shift");
    require(s.re > 0.5, "ShiftVector: shifts need Re(s) > 1/2");
    require(std::abs(s.im) <= height_cap, "ShiftVector: |Im s| exceeds height cap");
  }
}

cplx short_polynomial(ComplexPoint s, double t, double y, const MangoldtTable& table) {
  require(s.finite() && std::isfinite(t), "short_polynomial: non-finite argument");
  require(s.re > 0.5, "short_polynomial: requires Re(s) > 1/2");
  if (y < 2.0) return {0.0, 0.0};
  const auto top = static_cast<std::int64_t>(std::floor(y));
  check_table(top, table);
  const ComplexPoint st{s.re, s.im + t};
  cplx sum{0.0, 0.0};
  for (std::int64_t n = top; n >= 2; --n) {
    const double lam = table(n);
    if (lam != 0.0) sum += lam / std::log(static_cast<double>(n)) * pow_neg(st, n);
  }
  return sum;
}

CoefficientTable shift_product_coefficients(const ShiftVector& shifts, std::int64_t x,
                                const MangoldtTable& table) {
  shifts.validate();
  require(x >= 1, "shift_product_coefficients: x must be >= 1");
  check_table(x, table);
  const auto ux = static_cast<std::size_t>(x);

  CoefficientTable out;
  out.x = x;
  out.k = static_cast<int>(shifts.size());
  out.values.assign(ux + 1, cplx{0.0, 0.0});
  {
    const SparseSeries a = mangoldt_series(shifts.shifts[0], x, table);
    for (std::size_t i = 0; i < a.n.size(); ++i) out.values[static_cast<std::size_t>(a.n[i])] = a.a[i];
  }
  std::vector<cplx> next(ux + 1);
  for (std::size_t j = 1; j < shifts.size(); ++j) {
    const SparseSeries a = mangoldt_series(shifts.shifts[j], x / 2, table);
    std::fill(next.begin(), next.end(), cplx{0.0, 0.0});
    for (std::int64_t d = 2; d <= x / 2; ++d) {
      const cplx f = out.values[static_cast<std::size_t>(d)];
      if (f == cplx{0.0, 0.0}) continue;
      const std::int64_t top = x / d;
      for (std::size_t i = 0; i < a.n.size() && a.n[i] <= top; ++i)
        next[static_cast<std::size_t>(d * a.n[i])] += f * a.a[i];
    }
    out.values.swap(next);
  }
  return out;
}

double coefficient_bound_margin(const CoefficientTable& table, double sigma0) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 2; n <= table.x; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double bound = std::pow(2.0 * ln, table.k) * std::exp(-sigma0 * ln);
    margin = std::min(margin, bound - std::abs(table(n)));
  }
  return margin;
}

double diagonal_tail_bound(int beta, double sigma0, std::int64_t x) {
  require(beta >= 0 && sigma0 > 0.5, "diagonal_tail_bound: needs beta >= 0, sigma0 > 1/2");
  const double two_s = 2.0 * sigma0;
  auto f = [&](double u) { return std::pow(2.0 * std::log(u), beta) * std::pow(u, -two_s); };
  // f decreases beyond exp(beta / (2 sigma0)); sum explicitly up to there.
  const auto turn = static_cast<std::int64_t>(std::ceil(std::exp(beta / two_s)));
  double sum = 0.0;
  std::int64_t n = std::max<std::int64_t>(x, 1) + 1;
  for (; n <= turn; ++n) sum += f(static_cast<double>(n));
  // sum_{m >= n} f(m) <= f(n) + int_n^inf f; with v = log u the integral is
  // 2^beta Gamma(beta + 1, a log n) / a^{beta + 1}, a = 2 sigma0 - 1.
  const double a = two_s - 1.0;
  const double z = a * std::log(static_cast<double>(n));
  double term = 1.0, series = 1.0;
  for (int i = 1; i <= beta; ++i) {
    term *= z / i;
    series += term;
  }
  double fact = 1.0;
  for (int i = 2; i <= beta; ++i) fact *= i;
  const double integral = std::pow(2.0, beta) * fact * std::exp(-z) * series / std::pow(a, beta + 1);
  return sum + f(static_cast<double>(n)) + integral;
}

DiagonalMean diagonal_mean(const ShiftVector& sv, const ShiftVector& rv, std::int64_t x,
                           const MangoldtTable& table) {
  sv.validate();
  rv.validate();
  require(x >= 1, "diagonal_mean: x must be >= 1");
  check_table(x, table);
  const CoefficientTable fs = shift_product_coefficients(sv, x, table);
  const CoefficientTable fr = shift_product_coefficients(rv, x, table);
  DiagonalMean out;
  cplx sum{0.0, 0.0};
  for (std::int64_t n = x; n >= 2; --n) sum += fs(n) * fr(n);
  out.value = sum;
  const double sigma0 = std::min(sv.sigma0(), rv.sigma0());
  out.tail_bound = diagonal_tail_bound(fs.k + fr.k, sigma0, x);
  if (fs.k == 1 && fr.k == 1) {
    // sum_{n > x} Lambda(n) g(n), g(u) = u^{-2 sigma0} / log u, by parts with psi(u) < 1.04 u.
    const double xd = std::max(static_cast<double>(x), 2.0);
    out.sharp_tail = 1.04 * std::pow(xd, 1.0 - 2.0 * sigma0) / std::log(xd) *
                     (2.0 * sigma0) / (2.0 * sigma0 - 1.0);
  } else {
    out.sharp_tail = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

cplx coefficient_sum(const CoefficientTable& coeffs, double t) {
  cplx sum{0.0, 0.0};
  for (std::int64_t n = coeffs.x; n >= 2; --n) {
    const cplx f = coeffs(n);
    if (f != cplx{0.0, 0.0}) sum += f * unit_phase(t, n);
  }
  return sum;
}

cplx approximation_residual(double t, const ShiftVector& sv, const CoefficientTable& coeffs,
                            const EvalSettings& settings) {
  sv.validate();
  require(static_cast<std::size_t>(coeffs.k) == sv.size(),
          "approximation_residual: coefficient table built for a different shift count");
  cplx prod{1.0, 0.0};
  for (const auto& s : sv.shifts) prod *= log_zeta(s.shifted(t), settings);
  return prod - coefficient_sum(coeffs, t);
}

cplx approximation_residual(double t, const ShiftVector& sv, double y,
                            const MangoldtTable& table, const EvalSettings& settings) {
  const auto x = static_cast<std::int64_t>(std::floor(std::max(y, 1.0)));
  return approximation_residual(t, sv, shift_product_coefficients(sv, x, table), settings);
}

}  // namespace unilab
