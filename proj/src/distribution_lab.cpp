#include "unilab/distribution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "unilab/error.hpp"
#include "unilab/parallel.hpp"

namespace unilab {

namespace {

constexpr double kPi = std::numbers::pi;

ShiftSampleMatrix from_log_grid(LogZetaGrid&& g) {
  ShiftSampleMatrix out;
  out.grid = g.grid;
  out.shifts = std::move(g.shifts);
  out.values = std::move(g.values);
  out.mask = std::move(g.exceptional);
  for (std::size_t m = 0; m < out.mask.size(); ++m) {
    for (const auto& row : out.values) {
      if (!std::isfinite(row[m].real()) || !std::isfinite(row[m].imag())) out.mask[m] = 1;
    }
  }
  return out;
}

void check_rects(const ShiftSampleMatrix& matrix, const RectangleList& rects) {
  require(rects.size() == matrix.shift_count(), "rectangle list length must equal the shift count");
  for (const auto& r : rects) r.validate();
}

bool all_inside(const std::vector<std::vector<cplx>>& values, std::size_t m,
                const RectangleList& rects) {
  for (std::size_t j = 0; j < rects.size(); ++j) {
    if (!rects[j].contains(values[j][m])) return false;
  }
  return true;
}

double to_unit(std::uint64_t z) { return static_cast<double>(z >> 11) * 0x1.0p-53; }

/// Average of per-sample contributions over unmasked samples, summed in
/// fixed-size chunks and combined pairwise.
template <class T, class F>
T masked_average(const std::vector<std::uint8_t>& mask, F&& contribution, std::int64_t& used) {
  constexpr std::int64_t kChunk = 4096;
  const auto n = static_cast<std::int64_t>(mask.size());
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<T> partial(static_cast<std::size_t>(n_chunks), T{});
  std::vector<double> counts(partial.size(), 0.0);
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    T acc{};
    double cnt = 0.0;
    for (std::int64_t m = c * kChunk; m < std::min(n, (c + 1) * kChunk); ++m) {
      if (mask[static_cast<std::size_t>(m)]) continue;
      acc += contribution(static_cast<std::size_t>(m));
      cnt += 1.0;
    }
    partial[static_cast<std::size_t>(c)] = acc;
    counts[static_cast<std::size_t>(c)] = cnt;
  });
  used = static_cast<std::int64_t>(pairwise_sum(counts));
  if (used == 0) fail(ErrorCode::Validation, "every sample is masked");
  return pairwise_sum(std::span<const T>(partial)) / static_cast<double>(used);
}

}  // namespace

std::int64_t ShiftSampleMatrix::unmasked_count() const {
  return static_cast<std::int64_t>(std::count(mask.begin(), mask.end(), std::uint8_t{0}));
}

double ShiftSampleMatrix::masked_fraction() const {
  if (mask.empty()) return 0.0;
  return 1.0 - static_cast<double>(unmasked_count()) / static_cast<double>(mask.size());
}

ShiftSampleMatrix sample_shifts(const GridSweep& grid, const ShiftVector& shifts,
                                const EvalSettings& settings) {
  shifts.validate();
  grid.validate();
  return from_log_grid(log_zeta_grid(grid, shifts.shifts, settings));
}

ShiftSampleMatrix sample_reflected(const GridSweep& grid, const ShiftVector& shifts,
                                   const EvalSettings& settings) {
  ShiftVector conj = shifts;
  for (auto& s : conj.shifts) s = s.conj();
  return sample_shifts(grid, conj, settings);
}

void ModelRun::validate() const {
  require(samples >= 2, "model run: samples >= 2 required for a standard error");
  require(P >= 2, "model run: P >= 2 required");
}

ShiftSampleMatrix model_matrix(const std::vector<ComplexPoint>& shifts, const ModelRun& run) {
  run.validate();
  require(!shifts.empty(), "model_matrix: no shifts");
  ShiftSampleMatrix out;
  out.grid = GridSweep{0.0, 1.0, run.samples};
  out.shifts = shifts;
  out.values.assign(shifts.size(), std::vector<cplx>(static_cast<std::size_t>(run.samples)));
  out.mask.assign(static_cast<std::size_t>(run.samples), 0);
  const EulerRows rows(shifts, run.P);
  const std::int64_t n_chunks = (run.samples + kMcChunk - 1) / kMcChunk;
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    const std::int64_t i0 = c * kMcChunk;
    const std::int64_t i1 = std::min(run.samples, i0 + kMcChunk);
    RandomSample sample = draw_sample(sample_seed(run.seed, i0), run.P);
    std::vector<cplx> v(shifts.size());
    for (std::int64_t i = i0; i < i1; ++i) {
      if (i > i0) resample(sample, sample_seed(run.seed, i));
      rows.log_zeta(sample, v);
      for (std::size_t j = 0; j < v.size(); ++j) out.values[j][static_cast<std::size_t>(i)] = v[j];
    }
  });
  return out;
}

bool Rectangle::is_whole_plane() const {
  return std::isinf(re_lo) && re_lo < 0 && std::isinf(re_hi) && re_hi > 0 && std::isinf(im_lo) &&
         im_lo < 0 && std::isinf(im_hi) && im_hi > 0;
}

void Rectangle::validate() const {
  require(!std::isnan(re_lo) && !std::isnan(re_hi) && !std::isnan(im_lo) && !std::isnan(im_hi),
          "Rectangle: NaN bound");
  require(re_lo <= re_hi && im_lo <= im_hi, "Rectangle: lower bound above upper bound");
}

double grid_probability(const ShiftSampleMatrix& matrix, const RectangleList& rects) {
  check_rects(matrix, rects);
  std::int64_t used = 0;
  return masked_average<double>(
      matrix.mask, [&](std::size_t m) { return all_inside(matrix.values, m, rects) ? 1.0 : 0.0; },
      used);
}

std::vector<McResult> model_probability(const std::vector<ComplexPoint>& shifts,
                                        const std::vector<RectangleList>& family,
                                        const ModelRun& run) {
  run.validate();
  require(!family.empty(), "model_probability: empty family");
  for (const auto& rects : family) {
    require(rects.size() == shifts.size(), "rectangle list length must equal the shift count");
    for (const auto& r : rects) r.validate();
  }
  const EulerRows rows(shifts, run.P);
  auto f = [&](const RandomSample& sample, std::span<double> out) {
    std::vector<cplx> v(shifts.size());
    rows.log_zeta(sample, v);
    for (std::size_t k = 0; k < family.size(); ++k) {
      bool inside = true;
      for (std::size_t j = 0; j < v.size() && inside; ++j) inside = family[k][j].contains(v[j]);
      out[k] = inside ? 1.0 : 0.0;
    }
  };
  return mc_expectation(f, family.size(), run.samples, run.seed, run.P);
}

std::vector<RectangleList> random_rectangle_family(const ShiftSampleMatrix& matrix,
                                                   std::size_t count, std::uint64_t seed,
                                                   double min_side, double max_side) {
  require(count >= 1, "random_rectangle_family: count must be positive");
  require(min_side > 0.0 && min_side <= max_side, "random_rectangle_family: bad side range");
  const std::size_t J = matrix.shift_count();
  // sorted unmasked coordinates per shift
  std::vector<std::vector<double>> re(J), im(J);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t m = 0; m < matrix.mask.size(); ++m) {
      if (matrix.mask[m]) continue;
      re[j].push_back(matrix.values[j][m].real());
      im[j].push_back(matrix.values[j][m].imag());
    }
    require(!re[j].empty(), "random_rectangle_family: every sample is masked");
    std::sort(re[j].begin(), re[j].end());
    std::sort(im[j].begin(), im[j].end());
  }
  auto quantile = [](const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  std::mt19937_64 rng(seed);
  const double log_lo = std::log(min_side), log_span = std::log(max_side) - log_lo;
  auto side = [&] { return std::exp(log_lo + log_span * to_unit(rng())); };
  auto level = [&] { return 0.05 + 0.9 * to_unit(rng()); };
  std::vector<RectangleList> family(count, RectangleList(J));
  for (auto& rects : family) {
    for (std::size_t j = 0; j < J; ++j) {
      const double cr = quantile(re[j], level()), ci = quantile(im[j], level());
      const double wr = side(), wi = side();
      rects[j] = {cr - wr / 2, cr + wr / 2, ci - wi / 2, ci + wi / 2};
    }
  }
  return family;
}

DiscrepancyResult discrepancy_over_family(const ShiftSampleMatrix& matrix,
                                          const std::vector<RectangleList>& family,
                                          const ModelRun& run) {
  require(!family.empty(), "discrepancy_over_family: empty family");
  DiscrepancyResult out;
  out.grid.reserve(family.size());
  for (const auto& rects : family) out.grid.push_back(grid_probability(matrix, rects));
  out.model = model_probability(matrix.shifts, family, run);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double d = std::abs(out.grid[k] - out.model[k].mean);
    if (d > out.value) {
      out.value = d;
      out.argmax = k;
    }
    out.max_std_error = std::max(out.max_std_error, out.model[k].std_error);
  }
  double sigma0 = std::numeric_limits<double>::infinity();
  for (const auto& s : matrix.shifts) sigma0 = std::min(sigma0, s.re);
  const double J = static_cast<double>(matrix.shift_count());
  const double T = matrix.grid.t0;
  out.reference = T > 1.0 ? J * J / std::pow(std::log(T), sigma0)
                          : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double CharFunPoint::radius() const {
  double r = 0.0;
  for (double x : u) r = std::max(r, std::abs(x));
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

void CharFunPoint::validate(std::size_t shifts, double cap) const {
  require(u.size() == shifts && v.size() == shifts, "CharFunPoint: u and v need one entry per shift");
  for (double x : u) require(std::isfinite(x), "CharFunPoint: non-finite frequency");
  for (double x : v) require(std::isfinite(x), "CharFunPoint: non-finite frequency");
  require(radius() <= cap, "CharFunPoint: frequency outside the configured cap");
}

namespace {

double phase_of(const CharFunPoint& p, std::span<const cplx> logs) {
  double a = 0.0;
  for (std::size_t j = 0; j < logs.size(); ++j) a += p.u[j] * logs[j].real() + p.v[j] * logs[j].imag();
  return a;
}

}  // namespace

cplx grid_char_fun(const ShiftSampleMatrix& matrix, const CharFunPoint& p, double cap) {
  return grid_char_fun(matrix, std::vector<CharFunPoint>{p}, cap)[0];
}

std::vector<cplx> grid_char_fun(const ShiftSampleMatrix& matrix,
                                const std::vector<CharFunPoint>& points, double cap) {
  for (const auto& p : points) p.validate(matrix.shift_count(), cap);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    std::int64_t used = 0;
    out.push_back(masked_average<cplx>(
        matrix.mask,
        [&](std::size_t m) {
          double a = 0.0;
          for (std::size_t j = 0; j < matrix.shift_count(); ++j)
            a += p.u[j] * matrix.values[j][m].real() + p.v[j] * matrix.values[j][m].imag();
          return cplx{std::cos(a), std::sin(a)};
        },
        used));
  }
  return out;
}

std::vector<ComplexMc> model_char_fun(const std::vector<ComplexPoint>& shifts,
                                      const std::vector<CharFunPoint>& points,
                                      const ModelRun& run, double cap) {
  run.validate();
  require(!points.empty(), "model_char_fun: no points");
  for (const auto& p : points) p.validate(shifts.size(), cap);
  const EulerRows rows(shifts, run.P);
  auto f = [&](const RandomSample& sample, std::span<double> out) {
    std::vector<cplx> v(shifts.size());
    rows.log_zeta(sample, v);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double a = phase_of(points[k], v);
      out[2 * k] = std::cos(a);
      out[2 * k + 1] = std::sin(a);
    }
  };
  const auto mc = mc_expectation(f, 2 * points.size(), run.samples, run.seed, run.P);
  std::vector<ComplexMc> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out[k].mean = {mc[2 * k].mean, mc[2 * k + 1].mean};
    out[k].std_error = std::hypot(mc[2 * k].std_error, mc[2 * k + 1].std_error);
  }
  return out;
}

GridMoment grid_moment(const ShiftSampleMatrix& s_side, const ShiftSampleMatrix& reflected) {
  require(s_side.sample_count() == reflected.sample_count() && s_side.grid.t0 == reflected.grid.t0 &&
              s_side.grid.step == reflected.grid.step,
          "grid_moment: matrices must share the grid");
  std::vector<std::uint8_t> mask(s_side.mask.size());
  for (std::size_t m = 0; m < mask.size(); ++m) mask[m] = s_side.mask[m] | reflected.mask[m];
  GridMoment out;
  out.value = masked_average<cplx>(
      mask,
      [&](std::size_t m) {
        cplx prod{1.0, 0.0};
        for (const auto& row : s_side.values) prod *= row[m];
        for (const auto& row : reflected.values) prod *= std::conj(row[m]);
        return prod;
      },
      out.used);
  return out;
}

SmoothedProbability smoothed_probability(const ShiftSampleMatrix& matrix,
                                         const RectangleList& rects, const Smoothing& d) {
  check_rects(matrix, rects);
  d.validate();
  const std::size_t J = rects.size();
  SmoothedProbability out;
  out.indicator = grid_probability(matrix, rects);
  // whole-line sides and empty sides are their own smoothing
  auto side_value = [&](const Interval& I, double x) {
    if (std::isinf(I.a) && std::isinf(I.b)) return 1.0;
    if (!(I.a < I.b)) return 0.0;
    return smoothed_indicator(x, I, d);
  };
  auto side_mass = [&](const Interval& I, double x) {
    if (!(I.a < I.b)) return 0.0;
    double k = 0.0;
    if (std::isfinite(I.a)) k += fejer_kernel(d.delta * (x - I.a));
    if (std::isfinite(I.b)) k += fejer_kernel(d.delta * (I.b - x));
    return k;
  };
  std::int64_t used = 0;
  out.value = masked_average<double>(
      matrix.mask,
      [&](std::size_t m) {
        double prod = 1.0;
        for (std::size_t j = 0; j < J; ++j) {
          const cplx z = matrix.values[j][m];
          prod *= side_value(rects[j].re_side(), z.real()) * side_value(rects[j].im_side(), z.imag());
        }
        return prod;
      },
      used);
  out.re_mass.resize(J);
  out.im_mass.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    out.re_mass[j] = masked_average<double>(
        matrix.mask, [&](std::size_t m) { return side_mass(rects[j].re_side(), matrix.values[j][m].real()); },
        used);
    out.im_mass[j] = masked_average<double>(
        matrix.mask, [&](std::size_t m) { return side_mass(rects[j].im_side(), matrix.values[j][m].imag()); },
        used);
    out.bound += out.re_mass[j] + out.im_mass[j];
  }
  return out;
}

double deriv_tail_shape(double V, double radius) {
  require(V > 1.0, "deriv_tail_shape: requires V > 1");
  const double sr = 0.75 - radius;
  require(sr > 0.5 && sr < 1.0, "deriv_tail_shape: radius must lie in (0, 1/4)");
  return std::exp(-std::pow(V, 1.0 / (1.0 - sr)) * std::pow(std::log(V), sr / (1.0 - sr)));
}

DerivTailTable deriv_tail_probabilities(const GridSweep& grid, double radius,
                                        const std::vector<double>& V_list, int boundary_points,
                                        const ModelRun& run, const EvalSettings& settings) {
  require(radius > 0.0 && radius < 0.25, "deriv_tail_probabilities: radius must lie in (0, 1/4)");
  require(boundary_points >= 1, "deriv_tail_probabilities: need boundary points");
  require(!V_list.empty() && std::is_sorted(V_list.begin(), V_list.end()),
          "deriv_tail_probabilities: V_list must be increasing");
  run.validate();
  std::vector<ComplexPoint> pts;
  for (int k = 0; k < boundary_points; ++k) {
    const cplx z = std::polar(radius, 2.0 * kPi * k / boundary_points);
    pts.emplace_back(0.75 + z.real(), z.imag());
  }

  // grid side: per-t boundary maximum of |zeta'|
  std::vector<double> gmax(static_cast<std::size_t>(grid.count), 0.0);
  GridZeta gz(grid, pts, settings, true);
  gz.run([&](const SweepBlock& b) {
    for (std::int64_t i = 0; i < b.steps; ++i) {
      double mx = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const double a = std::abs(b.at(pts.size() + k, i));
        mx = std::isfinite(a) ? std::max(mx, a) : std::numeric_limits<double>::infinity();
      }
      gmax[static_cast<std::size_t>(b.m0 + i)] = mx;
    }
  });

  DerivTailTable out;
  out.radius = radius;
  out.sigma_r = 0.75 - radius;
  out.boundary_points = boundary_points;
  std::vector<std::uint8_t> mask(gmax.size(), 0);
  for (std::size_t m = 0; m < gmax.size(); ++m) mask[m] = std::isfinite(gmax[m]) ? 0 : 1;
  out.grid_masked_fraction =
      static_cast<double>(std::count(mask.begin(), mask.end(), std::uint8_t{1})) /
      static_cast<double>(mask.size());

  const EulerRows rows(pts, run.P);
  auto f = [&](const RandomSample& sample, std::span<double> o) {
    std::vector<cplx> val(pts.size()), der(pts.size());
    rows.zeta(sample, val, der);
    double mx = 0.0;
    for (const auto& z : der) mx = std::max(mx, std::abs(z));
    for (std::size_t k = 0; k < V_list.size(); ++k) o[k] = mx > std::exp(V_list[k]) ? 1.0 : 0.0;
  };
  const auto mc = mc_expectation(f, V_list.size(), run.samples, run.seed, run.P);

  for (std::size_t k = 0; k < V_list.size(); ++k) {
    DerivTailRow row;
    row.V = V_list[k];
    const double level = std::exp(row.V);
    std::int64_t used = 0;
    row.grid_fraction = masked_average<double>(
        mask, [&](std::size_t m) { return gmax[m] > level ? 1.0 : 0.0; }, used);
    row.model = mc[k];
    row.reference_shape = row.V > 1.0 ? deriv_tail_shape(row.V, radius)
                                      : std::numeric_limits<double>::quiet_NaN();
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace unilab
