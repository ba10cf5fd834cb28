#pragma once

// Riemann zeta, its derivative and a branch-tracked logarithm in the strip
// 1/2 < Re(s) < 2 (and beyond), plus vectorized t-grid drivers.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "unilab/types.hpp"

namespace unilab {

struct EvalSettings {
  double target_abs_err = 1e-12;
  std::int64_t max_terms = 20'000'000;
  int em_order = 8;
  /// Floor for the Euler-Maclaurin cutoff N.
  std::int64_t min_terms = 10;
  /// |zeta| below this at a continuation node signals ZeroOnPath.
  double zero_guard = 1e-8;

  void validate() const;
};

/// Fixed-cutoff Euler-Maclaurin evaluation.
struct ZetaValue {
  cplx value;
  cplx derivative;  // zero unless requested
  std::int64_t terms = 0;
};

ZetaValue zeta_em(cplx s, std::int64_t terms, int em_order, bool with_derivative);

/// Euler-Maclaurin remainder corrections at cutoff N (everything except the
/// partial sum over n < N).
void em_corrections(cplx s, std::int64_t terms, int em_order, cplx& value,
                    cplx* derivative);

/// Cutoff chosen by doubling from max(min_terms, |t|/6) until two successive
/// evaluations agree within target_abs_err. Throws BudgetExceeded.
std::int64_t select_terms(ComplexPoint s, const EvalSettings& settings);

cplx zeta(ComplexPoint s, const EvalSettings& settings = {});
cplx zeta_prime(ComplexPoint s, const EvalSettings& settings = {});

/// log zeta(s) continued along the horizontal segment from 2 + i Im(s).
/// Throws ZeroOnPath when |zeta| < zero_guard at a node.
cplx log_zeta(ComplexPoint s, const EvalSettings& settings = {});

/// exp(-i t log n) with the angle reduced in extended precision.
cplx unit_phase(double t, std::int64_t n);
cplx unit_phase_ext(long double t, std::int64_t n);

/// S(t_m) = sum_{n=1}^{w.size()} w[n-1] n^{-i t_m} on the grid.
std::vector<cplx> sweep_dirichlet_sums(const GridSweep& grid,
                                       std::span<const cplx> weights);

/// Steps between direct recomputations of the rotating phases.
inline constexpr std::int64_t kRenormInterval = std::int64_t{1} << 16;
/// Grid steps per parallel chunk; chunks recompute their start phases.
inline constexpr std::int64_t kSweepChunk = 4096;

/// Rows x terms weight matrix for a multi-row sweep.
struct SweepRows {
  std::size_t rows = 0;
  std::size_t terms = 0;
  std::vector<double> re, im;

  SweepRows(std::size_t r, std::size_t n) : rows(r), terms(n), re(r * n), im(r * n) {}
  void set(std::size_t r, std::size_t n, cplx v) {
    re[r * terms + n] = v.real();
    im[r * terms + n] = v.imag();
  }
};

/// Block of results handed to a sweep consumer: rows x steps, row-major.
struct SweepBlock {
  std::int64_t m0 = 0;
  std::int64_t steps = 0;
  std::size_t rows = 0;
  std::span<const cplx> values;

  cplx at(std::size_t r, std::int64_t b) const {
    return values[r * static_cast<std::size_t>(steps) + static_cast<std::size_t>(b)];
  }
};

using SweepConsumer = std::function<void(const SweepBlock&)>;

/// Multi-row sweep; consumer receives one block per chunk (possibly from
/// several threads, each block covering distinct grid indices).
void sweep_rows(const GridSweep& grid, const SweepRows& rows,
                const SweepConsumer& consumer);

/// zeta (and zeta') at shift_j + i t_m for every shift and grid point.
/// Rows of the block: values for each shift, then (if requested)
/// derivatives for each shift.
class GridZeta {
 public:
  GridZeta(GridSweep grid, std::vector<ComplexPoint> shifts,
           EvalSettings settings, bool with_derivative);

  std::int64_t terms() const { return terms_; }
  const GridSweep& grid() const { return grid_; }
  const std::vector<ComplexPoint>& shifts() const { return shifts_; }

  void run(const SweepConsumer& consumer) const;

  /// Full matrix [row][m]; only for modest grids.
  std::vector<std::vector<cplx>> matrix() const;

 private:
  GridSweep grid_;
  std::vector<ComplexPoint> shifts_;
  EvalSettings settings_;
  bool with_derivative_;
  std::int64_t terms_;
};

/// log zeta(shift_j + i t_m) on a grid. Points where the zero detector fires
/// are retried once at t + step/1000 and always flagged exceptional.
struct LogZetaGrid {
  GridSweep grid;
  std::vector<ComplexPoint> shifts;
  std::vector<std::vector<cplx>> values;  // [j][m], NaN when unrecoverable
  std::vector<std::uint8_t> exceptional;  // [m]

  double exceptional_fraction() const;
};

LogZetaGrid log_zeta_grid(const GridSweep& grid,
                          const std::vector<ComplexPoint>& shifts,
                          const EvalSettings& settings = {});

}  // namespace unilab
