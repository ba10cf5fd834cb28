#pragma once

// Value-distribution statistics of log zeta over t-grids, and their
// random-model counterparts by Monte Carlo: probabilities of rectangles,
// moments of joint shifts, characteristic functions, rectangle discrepancy,
// smoothed probabilities and tail probabilities of derivative maxima.

#include <cstdint>
#include <limits>
#include <vector>

#include "unilab/beurling_selberg.hpp"
#include "unilab/dirichlet_approx.hpp"
#include "unilab/random_model.hpp"
#include "unilab/types.hpp"
#include "unilab/zeta_eval.hpp"

namespace unilab {

/// log zeta at each shift over a set of samples (grid points or model draws).
/// Masked samples are excluded from every statistic.
struct ShiftSampleMatrix {
  GridSweep grid;
  std::vector<ComplexPoint> shifts;
  std::vector<std::vector<cplx>> values;  // [j][m]
  std::vector<std::uint8_t> mask;         // [m], 1 = excluded

  std::size_t shift_count() const { return shifts.size(); }
  std::int64_t sample_count() const { return static_cast<std::int64_t>(mask.size()); }
  std::int64_t unmasked_count() const;
  double masked_fraction() const;
};

/// Branch-tracked log zeta(s_j + i t_m). Points flagged by the zero detector
/// or left non-finite are masked; evaluation never aborts the grid.
ShiftSampleMatrix sample_shifts(const GridSweep& grid, const ShiftVector& shifts,
                                const EvalSettings& settings = {});

/// Samples log zeta(conj(r_j) + i t_m), whose conjugates are log zeta(r_j - i t_m).
ShiftSampleMatrix sample_reflected(const GridSweep& grid, const ShiftVector& shifts,
                                   const EvalSettings& settings = {});

/// Monte Carlo parameters shared by every model-side statistic.
struct ModelRun {
  std::int64_t samples = 10'000;
  std::uint64_t seed = 1;
  std::int64_t P = 100'000;

  void validate() const;
};

/// log zeta(s_j, X) for the run's samples laid out like a grid matrix
/// (sample i in column i), for model-vs-model checks.
ShiftSampleMatrix model_matrix(const std::vector<ComplexPoint>& shifts, const ModelRun& run);

/// Half-open [re_lo, re_hi) x [im_lo, im_hi); infinite bounds allowed.
struct Rectangle {
  double re_lo = -std::numeric_limits<double>::infinity();
  double re_hi = std::numeric_limits<double>::infinity();
  double im_lo = -std::numeric_limits<double>::infinity();
  double im_hi = std::numeric_limits<double>::infinity();

  static Rectangle whole_plane() { return {}; }
  static Rectangle empty() { return {0.0, 0.0, 0.0, 0.0}; }

  bool is_whole_plane() const;
  bool contains(cplx z) const {
    return re_lo <= z.real() && z.real() < re_hi && im_lo <= z.imag() && z.imag() < im_hi;
  }
  Interval re_side() const { return {re_lo, re_hi}; }
  Interval im_side() const { return {im_lo, im_hi}; }
  void validate() const;
};

/// One rectangle per shift.
using RectangleList = std::vector<Rectangle>;

/// Fraction of unmasked samples with log zeta(s_j + it) in R_j for every j.
double grid_probability(const ShiftSampleMatrix& matrix, const RectangleList& rects);

/// P(log zeta(s_j, X) in R_j for all j) for each list in the family.
std::vector<McResult> model_probability(const std::vector<ComplexPoint>& shifts,
                                        const std::vector<RectangleList>& family,
                                        const ModelRun& run);

/// Seeded family of rectangle lists: each side centered on an empirical
/// quantile (level uniform in [0.05, 0.95]) of the matching coordinate,
/// side lengths log-uniform in [min_side, max_side].
std::vector<RectangleList> random_rectangle_family(const ShiftSampleMatrix& matrix,
                                                   std::size_t count, std::uint64_t seed,
                                                   double min_side = 0.05, double max_side = 5.0);

struct DiscrepancyResult {
  double value = 0.0;          // max over the family of |grid - model|
  std::size_t argmax = 0;
  std::vector<double> grid;    // per family member
  std::vector<McResult> model;
  double max_std_error = 0.0;
  /// J^2 / (log T)^sigma0 with T = grid.t0, sigma0 = min Re s_j.
  double reference = 0.0;
};

DiscrepancyResult discrepancy_over_family(const ShiftSampleMatrix& matrix,
                                          const std::vector<RectangleList>& family,
                                          const ModelRun& run);

/// Frequencies (u_j, v_j) pairing with (Re, Im) of the j-th log.
struct CharFunPoint {
  std::vector<double> u, v;

  /// Max of |u_j|, |v_j|.
  double radius() const;
  void validate(std::size_t shifts, double cap) const;
};

inline constexpr double kDefaultCharFunCap = 5.0;

/// Grid average of exp(i sum_j (u_j Re + v_j Im) log zeta(s_j + it)).
cplx grid_char_fun(const ShiftSampleMatrix& matrix, const CharFunPoint& p,
                   double cap = kDefaultCharFunCap);
std::vector<cplx> grid_char_fun(const ShiftSampleMatrix& matrix,
                                const std::vector<CharFunPoint>& points,
                                double cap = kDefaultCharFunCap);

struct ComplexMc {
  cplx mean;
  /// sqrt(SE_re^2 + SE_im^2)
  double std_error = 0.0;
};

std::vector<ComplexMc> model_char_fun(const std::vector<ComplexPoint>& shifts,
                                      const std::vector<CharFunPoint>& points,
                                      const ModelRun& run, double cap = kDefaultCharFunCap);

struct GridMoment {
  cplx value;
  std::int64_t used = 0;  // samples unmasked on both sides
};

/// Average over samples unmasked in both matrices of
/// prod_j log zeta(s_j + it) * prod_j conj(reflected_j), where `reflected`
/// comes from sample_reflected, so the second product is prod log zeta(r_j - it).
GridMoment grid_moment(const ShiftSampleMatrix& s_side, const ShiftSampleMatrix& reflected);

struct SmoothedProbability {
  double value = 0.0;      // grid average of prod_j F(Re) F(Im)
  double indicator = 0.0;  // grid_probability
  /// Per shift: grid averages of the Fejer masses K(d(x-a)) + K(d(b-x))
  /// of the real and imaginary sides; their sum bounds |value - indicator|.
  std::vector<double> re_mass, im_mass;
  double bound = 0.0;
};

SmoothedProbability smoothed_probability(const ShiftSampleMatrix& matrix,
                                         const RectangleList& rects, const Smoothing& d);

struct DerivTailRow {
  double V = 0.0;
  double grid_fraction = 0.0;  // P_T(max |zeta'| > e^V)
  McResult model;              // same for the random model
  double reference_shape = 0.0;
};

struct DerivTailTable {
  double radius = 0.0;
  double sigma_r = 0.0;  // 3/4 - radius
  int boundary_points = 0;
  double grid_masked_fraction = 0.0;
  std::vector<DerivTailRow> rows;
};

/// exp(-V^{1/(1-sr)} (log V)^{sr/(1-sr)}), sr = 3/4 - radius; shape only.
double deriv_tail_shape(double V, double radius);

/// Exceedance of max_{|z| = radius} |zeta'(3/4 + it + z)| over e^V, sampled at
/// `boundary_points` equally spaced boundary points (the disc maximum sits on
/// the boundary), on the grid and in the random model.
DerivTailTable deriv_tail_probabilities(const GridSweep& grid, double radius,
                                        const std::vector<double>& V_list, int boundary_points,
                                        const ModelRun& run, const EvalSettings& settings = {});

}  // namespace unilab
