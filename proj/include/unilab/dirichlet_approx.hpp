#pragma once

// Von Mangoldt tables, the short Dirichlet polynomial for log zeta, k-fold
// coefficient tables for products of shifted logs, and their diagonal mean.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "unilab/types.hpp"
#include "unilab/zeta_eval.hpp"

namespace unilab {

struct MangoldtTable {
  std::int64_t limit = 0;
  std::vector<double> lambda;  // lambda[n] for 0 <= n <= limit; lambda[0] unused

  double operator()(std::int64_t n) const { return lambda[static_cast<std::size_t>(n)]; }
};

struct TableOptions {
  /// Directory for the binary sieve cache. UNILAB_CACHE overrides; when
  /// neither is set the table is sieved in memory only.
  std::optional<std::filesystem::path> cache_dir;
  std::int64_t max_limit = 200'000'000;
};

/// Effective cache directory (UNILAB_CACHE, then options), if any.
std::optional<std::filesystem::path> resolve_cache_dir(const TableOptions& options);

MangoldtTable build_mangoldt(std::int64_t limit, const TableOptions& options = {});

/// Sieve of Eratosthenes; primes p <= limit in increasing order.
std::vector<std::int64_t> primes_up_to(std::int64_t limit);

inline constexpr std::uint32_t kMangoldtCacheVersion = 1;

/// Path of the cache file for a given limit inside dir.
std::filesystem::path mangoldt_cache_file(const std::filesystem::path& dir, std::int64_t limit);

/// Joint shift tuple (s_1, ..., s_k).
struct ShiftVector {
  std::vector<ComplexPoint> shifts;
  /// Optional cap on |Im s_j|; infinite means unchecked.
  double height_cap = std::numeric_limits<double>::infinity();

  std::size_t size() const { return shifts.size(); }
  double sigma0() const;
  void validate() const;
};

/// values[n] = F_s(n) for 0 <= n <= x (values[0] unused, values[1] = 0).
struct CoefficientTable {
  std::int64_t x = 0;
  int k = 0;
  std::vector<cplx> values;

  cplx operator()(std::int64_t n) const { return values[static_cast<std::size_t>(n)]; }
};

/// sum_{2 <= n <= y} Lambda(n) / log n * n^{-(s + it)}.
cplx short_polynomial(ComplexPoint s, double t, double y, const MangoldtTable& table);

/// Iterated Dirichlet convolution of a_j(n) = Lambda(n) n^{-s_j} / log n.
CoefficientTable shift_product_coefficients(const ShiftVector& shifts, std::int64_t x,
                                const MangoldtTable& table);

/// min over 2 <= n <= x of (2 log n)^k n^{-sigma0} - |F(n)|.
double coefficient_bound_margin(const CoefficientTable& table, double sigma0);

struct DiagonalMean {
  cplx value;
  /// sum_{n > x} (2 log n)^{k+l} n^{-2 sigma0}, bounded by an integral.
  double tail_bound = 0.0;
  /// For k = l = 1 only: sum_{n > x} Lambda(n) / log n * n^{-2 sigma0} via
  /// psi(u) < 1.04 u; NaN otherwise.
  double sharp_tail = 0.0;
};

/// sum_{n <= x} F_s(n) F_r(n): the t-average of prod log zeta(s_j + it) *
/// prod log zeta(r_j - it), and E[prod log zeta(s_j, X) * prod conj log zeta(conj r_j, X)].
DiagonalMean diagonal_mean(const ShiftVector& sv, const ShiftVector& rv, std::int64_t x,
                           const MangoldtTable& table);

/// sum_{n > x} (2 log n)^beta n^{-2 sigma0}, upper bound.
double diagonal_tail_bound(int beta, double sigma0, std::int64_t x);

/// prod_j log zeta(s_j + it) - sum_{n <= y} F(n) n^{-it}. Propagates ZeroOnPath.
cplx approximation_residual(double t, const ShiftVector& sv, double y,
                            const MangoldtTable& table, const EvalSettings& settings = {});

/// Same with a prebuilt coefficient table (y = coeffs.x).
cplx approximation_residual(double t, const ShiftVector& sv, const CoefficientTable& coeffs,
                            const EvalSettings& settings = {});

/// sum_{n <= x} F(n) n^{-it}.
cplx coefficient_sum(const CoefficientTable& coeffs, double t);

}  // namespace unilab
