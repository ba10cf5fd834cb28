#include "unilab/zeta_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "unilab/error.hpp"
#include "unilab/kernels.hpp"
#include "unilab/parallel.hpp"

namespace unilab {

namespace {

// B_{2k} / (2k)!, k = 1..20.
constexpr std::array<double, 20> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
    -23749461029.0 / 870.0 / 3.0488834461171387e29,
    8615841276005.0 / 14322.0 / 2.6525285981219107e32,
    -7709321041217.0 / 510.0 / 2.631308369336935e35,
    2577687858367.0 / 6.0 / 2.9523279903960416e38,
    -2.6315271553053477e19 / 1919190.0 / 3.7199332678990125e41,
    2929993913841559.0 / 6.0 / 5.230226174666011e44,
    -2.6108271849644912e20 / 13530.0 / 8.159152832478977e47,
};

constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;
constexpr double kPi = std::numbers::pi;

cplx power_neg(double sigma, double t, std::int64_t n) {
  return std::exp(-sigma * std::log(static_cast<double>(n))) * unit_phase(t, n);
}

ZetaValue converge(ComplexPoint s, const EvalSettings& settings, bool want_derivative) {
  settings.validate();
  if (s.re == 1.0 && s.im == 0.0) fail(ErrorCode::PoleAtOne, "zeta: pole at s = 1");
  const double tol = want_derivative ? 10.0 * settings.target_abs_err : settings.target_abs_err;
  std::int64_t n = std::max<std::int64_t>(
      settings.min_terms, static_cast<std::int64_t>(std::ceil(std::abs(s.im) / 6.0)));
  if (n > settings.max_terms) fail(ErrorCode::BudgetExceeded, "zeta: term budget exceeded");
  ZetaValue prev = zeta_em(s.value(), n, settings.em_order, want_derivative);
  for (;;) {
    n *= 2;
    if (n > settings.max_terms) fail(ErrorCode::BudgetExceeded, "zeta: term budget exceeded");
    ZetaValue cur = zeta_em(s.value(), n, settings.em_order, want_derivative);
    const double diff = want_derivative ? std::abs(cur.derivative - prev.derivative)
                                        : std::abs(cur.value - prev.value);
    if (diff <= tol && std::isfinite(diff)) return cur;
    prev = cur;
  }
}

// Principal-branch continuation of arg zeta along sigma in [sigma_to, 2].
class ArgTracker {
 public:
  ArgTracker(double t, std::int64_t terms, const EvalSettings& settings)
      : t_(t), terms_(terms), settings_(settings) {}

  cplx eval(double sigma) const {
    const cplx z = zeta_em({sigma, t_}, terms_, settings_.em_order, false).value;
    if (!(std::abs(z) >= settings_.zero_guard))
      fail(ErrorCode::ZeroOnPath, "log_zeta: |zeta| below zero guard on continuation path");
    return z;
  }

  // Advances from (a, za) to b; accumulates the argument increment.
  cplx advance(double a, cplx za, double b, int depth) {
    const cplx zb = eval(b);
    const double d = std::arg(zb / za);
    if (std::abs(d) < kPi / 4.0) {
      arg_ += d;
      return zb;
    }
    if (depth > 40)
      fail(ErrorCode::ZeroOnPath, "log_zeta: phase continuation did not resolve");
    const double mid = 0.5 * (a + b);
    const cplx zm = advance(a, za, mid, depth + 1);
    return advance(mid, zm, b, depth + 1);
  }

  double arg_ = 0.0;

 private:
  double t_;
  std::int64_t terms_;
  const EvalSettings& settings_;
};

cplx snap_branch(cplx z, double tracked_arg) {
  const double principal = std::arg(z);
  const double k = std::round((tracked_arg - principal) / (2.0 * kPi));
  return {std::log(std::abs(z)), principal + 2.0 * kPi * k};
}

}  // namespace

void EvalSettings::validate() const {
  require(target_abs_err >= 1e-14, "EvalSettings: target_abs_err must be >= 1e-14");
  require(max_terms > 0, "EvalSettings: max_terms must be positive");
  require(em_order >= 1 && em_order <= 20, "EvalSettings: em_order must be in [1, 20]");
  require(min_terms >= 1, "EvalSettings: min_terms must be positive");
  require(zero_guard >= 0.0, "EvalSettings: zero_guard must be nonnegative");
}

cplx unit_phase(double t, std::int64_t n) {
  return unit_phase_ext(static_cast<long double>(t), n);
}

cplx unit_phase_ext(long double t, std::int64_t n) {
  if (n == 1 || t == 0.0L) return {1.0, 0.0};
  const long double ang = std::fmod(t * std::log(static_cast<long double>(n)), kTwoPiL);
  const double a = static_cast<double>(ang);
  return {std::cos(a), -std::sin(a)};
}

void em_corrections(cplx s, std::int64_t terms, int em_order, cplx& value,
                    cplx* derivative) {
  if (s == cplx{1.0, 0.0}) fail(ErrorCode::PoleAtOne, "zeta: pole at s = 1");
  const double big_n = static_cast<double>(terms);
  const double log_n = std::log(big_n);
  const cplx n_pow = power_neg(s.real(), s.imag(), terms);  // N^{-s}
  const cplx sm1 = s - 1.0;

  value = big_n * n_pow / sm1 + 0.5 * n_pow;
  cplx d{0.0, 0.0};
  if (derivative != nullptr)
    d = big_n * n_pow * (-log_n / sm1 - 1.0 / (sm1 * sm1)) - 0.5 * log_n * n_pow;

  cplx poly = s;             // s (s+1) ... (s+2k-2)
  cplx dpoly{1.0, 0.0};      // its s-derivative
  cplx npow = n_pow / big_n; // N^{-s-2k+1}
  const double inv_n2 = 1.0 / (big_n * big_n);
  for (int k = 1; k <= em_order; ++k) {
    const double c = kBernoulliOverFactorial[static_cast<std::size_t>(k - 1)];
    value += c * poly * npow;
    if (derivative != nullptr) d += c * (dpoly - log_n * poly) * npow;
    for (int j = 2 * k - 1; j <= 2 * k; ++j) {
      const cplx f = s + static_cast<double>(j);
      dpoly = dpoly * f + poly;
      poly *= f;
    }
    npow *= inv_n2;
  }
  if (derivative != nullptr) *derivative = d;
}

ZetaValue zeta_em(cplx s, std::int64_t terms, int em_order, bool with_derivative) {
  require(terms >= 1, "zeta_em: terms must be positive");
  cplx sum{0.0, 0.0};
  cplx dsum{0.0, 0.0};
  for (std::int64_t n = 1; n < terms; ++n) {
    const cplx p = power_neg(s.real(), s.imag(), n);
    sum += p;
    if (with_derivative) dsum -= std::log(static_cast<double>(n)) * p;
  }
  cplx corr, dcorr;
  em_corrections(s, terms, em_order, corr, with_derivative ? &dcorr : nullptr);
  ZetaValue out;
  out.value = sum + corr;
  out.derivative = with_derivative ? dsum + dcorr : cplx{};
  out.terms = terms;
  return out;
}

std::int64_t select_terms(ComplexPoint s, const EvalSettings& settings) {
  return converge(s, settings, false).terms;
}

cplx zeta(ComplexPoint s, const EvalSettings& settings) {
  require(s.finite(), "zeta: non-finite argument");
  return converge(s, settings, false).value;
}

cplx zeta_prime(ComplexPoint s, const EvalSettings& settings) {
  require(s.finite(), "zeta_prime: non-finite argument");
  return converge(s, settings, true).derivative;
}

cplx log_zeta(ComplexPoint s, const EvalSettings& settings) {
  require(s.finite() && s.re > 0.5, "log_zeta: requires Re(s) > 1/2");
  if (s.re >= 2.0) {
    const cplx z = zeta(s, settings);
    if (!(std::abs(z) >= settings.zero_guard))
      fail(ErrorCode::ZeroOnPath, "log_zeta: |zeta| below zero guard");
    return std::log(z);  // |zeta - 1| < 1 here, so the principal branch is the series branch
  }
  const std::int64_t terms = std::max(select_terms(s, settings),
                                      select_terms({2.0, s.im}, settings));
  ArgTracker tracker(s.im, terms, settings);
  cplx z = tracker.eval(2.0);
  tracker.arg_ = std::arg(z);
  constexpr int kSegments = 8;
  double a = 2.0;
  for (int k = 1; k <= kSegments; ++k) {
    const double b = k == kSegments ? s.re : 2.0 + (s.re - 2.0) * k / kSegments;
    z = tracker.advance(a, z, b, 0);
    a = b;
  }
  return snap_branch(z, tracker.arg_);
}

// ---------------------------------------------------------------------------
// Grid drivers

std::vector<cplx> sweep_dirichlet_sums(const GridSweep& grid, std::span<const cplx> weights) {
  grid.validate();
  SweepRows rows(1, weights.size());
  for (std::size_t n = 0; n < weights.size(); ++n) rows.set(0, n, weights[n]);
  std::vector<cplx> out(static_cast<std::size_t>(grid.count));
  sweep_rows(grid, rows, [&](const SweepBlock& blk) {
    for (std::int64_t b = 0; b < blk.steps; ++b)
      out[static_cast<std::size_t>(blk.m0 + b)] = blk.at(0, b);
  });
  return out;
}

void sweep_rows(const GridSweep& grid, const SweepRows& rows, const SweepConsumer& consumer) {
  grid.validate();
  const std::int64_t n_chunks = (grid.count + kSweepChunk - 1) / kSweepChunk;
  const auto& k = kernels::active();
  const std::size_t terms = rows.terms;

  std::vector<double> rot_re(terms), rot_im(terms);
  for (std::size_t n = 0; n < terms; ++n) {
    const cplx r = unit_phase(grid.step, static_cast<std::int64_t>(n + 1));
    rot_re[n] = r.real();
    rot_im[n] = r.imag();
  }

  parallel_chunks(n_chunks, [&](std::int64_t c) {
    const std::int64_t m_begin = c * kSweepChunk;
    const std::int64_t m_end = std::min(grid.count, m_begin + kSweepChunk);
    const std::int64_t steps = m_end - m_begin;
    std::vector<double> ph_re(terms), ph_im(terms);
    std::vector<double> out_re(rows.rows * static_cast<std::size_t>(steps));
    std::vector<double> out_im(out_re.size());
    std::vector<double> part_re, part_im;

    for (std::int64_t s0 = 0; s0 < steps; s0 += kRenormInterval) {
      const std::int64_t len = std::min(kRenormInterval, steps - s0);
      // exact t0 + m*step, not its double rounding, so restarts line up with the rotation
      const long double t = static_cast<long double>(grid.t0) +
                            static_cast<long double>(m_begin + s0) * static_cast<long double>(grid.step);
      for (std::size_t n = 0; n < terms; ++n) {
        const cplx z = unit_phase_ext(t, static_cast<std::int64_t>(n + 1));
        ph_re[n] = z.real();
        ph_im[n] = z.imag();
      }
      const bool whole = len == steps;
      if (!whole) {
        part_re.assign(rows.rows * static_cast<std::size_t>(len), 0.0);
        part_im.assign(part_re.size(), 0.0);
      }
      kernels::SweepArgs args;
      args.rows = rows.rows;
      args.terms = terms;
      args.steps = static_cast<std::size_t>(len);
      args.w_re = rows.re;
      args.w_im = rows.im;
      args.phase_re = ph_re;
      args.phase_im = ph_im;
      args.rot_re = rot_re;
      args.rot_im = rot_im;
      args.out_re = whole ? std::span<double>(out_re) : std::span<double>(part_re);
      args.out_im = whole ? std::span<double>(out_im) : std::span<double>(part_im);
      k.sweep(args);
      if (!whole) {
        for (std::size_t r = 0; r < rows.rows; ++r)
          for (std::int64_t b = 0; b < len; ++b) {
            const std::size_t dst = r * static_cast<std::size_t>(steps) + static_cast<std::size_t>(s0 + b);
            const std::size_t src = r * static_cast<std::size_t>(len) + static_cast<std::size_t>(b);
            out_re[dst] = part_re[src];
            out_im[dst] = part_im[src];
          }
      }
    }

    std::vector<cplx> vals(out_re.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = {out_re[i], out_im[i]};
    SweepBlock blk;
    blk.m0 = m_begin;
    blk.steps = steps;
    blk.rows = rows.rows;
    blk.values = vals;
    consumer(blk);
  });
}

GridZeta::GridZeta(GridSweep grid, std::vector<ComplexPoint> shifts, EvalSettings settings,
                   bool with_derivative)
    : grid_(grid),
      shifts_(std::move(shifts)),
      settings_(settings),
      with_derivative_(with_derivative),
      terms_(0) {
  grid_.validate();
  settings_.validate();
  require(!shifts_.empty(), "GridZeta: at least one shift required");
  for (const auto& s : shifts_) {
    require(s.finite(), "GridZeta: non-finite shift");
    const double height =
        std::max(std::abs(grid_.t0 + s.im), std::abs(grid_.t_max() + s.im));
    const ZetaValue v = converge({s.re, height}, settings_, with_derivative_);
    terms_ = std::max(terms_, v.terms);
  }
}

void GridZeta::run(const SweepConsumer& consumer) const {
  const std::size_t n_shift = shifts_.size();
  const std::size_t n_rows = with_derivative_ ? 2 * n_shift : n_shift;
  const std::size_t terms = static_cast<std::size_t>(terms_ - 1);
  SweepRows rows(n_rows, terms);
  for (std::size_t j = 0; j < n_shift; ++j) {
    for (std::size_t n = 0; n < terms; ++n) {
      const std::int64_t nn = static_cast<std::int64_t>(n + 1);
      const cplx w = power_neg(shifts_[j].re, shifts_[j].im, nn);
      rows.set(j, n, w);
      if (with_derivative_) rows.set(n_shift + j, n, -std::log(static_cast<double>(nn)) * w);
    }
  }

  sweep_rows(grid_, rows, [&](const SweepBlock& raw) {
    std::vector<cplx> vals(raw.values.begin(), raw.values.end());
    const auto steps = static_cast<std::size_t>(raw.steps);
    for (std::size_t j = 0; j < n_shift; ++j) {
      for (std::size_t b = 0; b < steps; ++b) {
        const cplx s{shifts_[j].re, shifts_[j].im + grid_.at(raw.m0 + static_cast<std::int64_t>(b))};
        cplx corr, dcorr;
        em_corrections(s, terms_, settings_.em_order, corr, with_derivative_ ? &dcorr : nullptr);
        vals[j * steps + b] += corr;
        if (with_derivative_) vals[(n_shift + j) * steps + b] += dcorr;
      }
    }
    SweepBlock blk = raw;
    blk.values = vals;
    consumer(blk);
  });
}

std::vector<std::vector<cplx>> GridZeta::matrix() const {
  const std::size_t n_rows = with_derivative_ ? 2 * shifts_.size() : shifts_.size();
  std::vector<std::vector<cplx>> out(n_rows, std::vector<cplx>(static_cast<std::size_t>(grid_.count)));
  run([&](const SweepBlock& blk) {
    for (std::size_t r = 0; r < n_rows; ++r)
      for (std::int64_t b = 0; b < blk.steps; ++b)
        out[r][static_cast<std::size_t>(blk.m0 + b)] = blk.at(r, b);
  });
  return out;
}

double LogZetaGrid::exceptional_fraction() const {
  if (exceptional.empty()) return 0.0;
  std::int64_t n = 0;
  for (auto e : exceptional) n += e;
  return static_cast<double>(n) / static_cast<double>(exceptional.size());
}

LogZetaGrid log_zeta_grid(const GridSweep& grid, const std::vector<ComplexPoint>& shifts,
                          const EvalSettings& settings) {
  grid.validate();
  settings.validate();
  require(!shifts.empty(), "log_zeta_grid: at least one shift required");
  constexpr double kLadderStep = 0.125;

  // Continuation ladder: for each shift, abscissae from 2 down to Re(s_j).
  std::vector<ComplexPoint> nodes;
  std::vector<std::size_t> first(shifts.size()), count(shifts.size());
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    const ComplexPoint& s = shifts[j];
    require(s.finite() && s.re > 0.5, "log_zeta_grid: shifts need Re(s) > 1/2");
    first[j] = nodes.size();
    if (s.re >= 2.0) {
      nodes.push_back(s);
      count[j] = 1;
      continue;
    }
    const auto k = static_cast<std::size_t>(std::ceil((2.0 - s.re) / kLadderStep));
    for (std::size_t i = 0; i <= k; ++i) {
      const double sigma = i == k ? s.re : 2.0 - (2.0 - s.re) * static_cast<double>(i) / static_cast<double>(k);
      nodes.push_back({sigma, s.im});
    }
    count[j] = k + 1;
  }

  LogZetaGrid out;
  out.grid = grid;
  out.shifts = shifts;
  out.values.assign(shifts.size(), std::vector<cplx>(static_cast<std::size_t>(grid.count)));
  out.exceptional.assign(static_cast<std::size_t>(grid.count), 0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  GridZeta gz(grid, nodes, settings, false);
  gz.run([&](const SweepBlock& blk) {
    for (std::int64_t b = 0; b < blk.steps; ++b) {
      const std::int64_t m = blk.m0 + b;
      const double t = grid.at(m);
      for (std::size_t j = 0; j < shifts.size(); ++j) {
        bool ok = true;
        cplx prev = blk.at(first[j], b);
        double arg = std::arg(prev);
        ok = std::abs(prev) >= settings.zero_guard;
        for (std::size_t i = 1; ok && i < count[j]; ++i) {
          const cplx cur = blk.at(first[j] + i, b);
          if (!(std::abs(cur) >= settings.zero_guard)) {
            ok = false;
            break;
          }
          const double d = std::arg(cur / prev);
          if (!(std::abs(d) < kPi / 4.0)) {
            ok = false;
            break;
          }
          arg += d;
          prev = cur;
        }
        cplx value;
        if (ok) {
          value = count[j] == 1 ? std::log(prev) : snap_branch(prev, arg);
        } else {
          const ComplexPoint s = shifts[j].shifted(t);
          try {
            value = log_zeta(s, settings);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroOnPath) throw;
            out.exceptional[static_cast<std::size_t>(m)] = 1;
            try {
              value = log_zeta(s.shifted(grid.step / 1000.0), settings);
            } catch (const Error& e2) {
              if (e2.code() != ErrorCode::ZeroOnPath) throw;
              value = {nan, nan};
            }
          }
        }
        out.values[j][static_cast<std::size_t>(m)] = value;
      }
    }
  });
  return out;
}

}  // namespace unilab
