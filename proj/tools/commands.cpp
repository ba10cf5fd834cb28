#include "commands.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "unilab/beurling_selberg.hpp"
#include "unilab/dirichlet_approx.hpp"
#include "unilab/distribution_lab.hpp"
#include "unilab/error.hpp"
#include "unilab/random_model.hpp"
#include "unilab/universality_scan.hpp"
#include "unilab/zeta_eval.hpp"

namespace unilab::cli {

namespace {

constexpr double kPi = std::numbers::pi;

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

ModelRun read_run(ConfigReader& c, std::int64_t samples) {
  ModelRun run;
  run.samples = c.integer("samples", samples);
  run.P = c.integer("P", 100'000);
  run.seed = c.seed("seed", 1);
  try {
    run.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Validation, e.what());
  }
  return run;
}

GridSweep read_window(ConfigReader& c, double step) {
  const double T = c.number("T", 1e4);
  const double h = c.number("step", step);
  if (!(T > 10.0)) fail(ErrorCode::Validation, "T must exceed 10");
  if (!(h > 0.0) || T / h > 1e8) fail(ErrorCode::Validation, "step must be positive and give at most 1e8 points");
  return GridSweep::window(T, h);
}

ShiftVector read_shifts(ConfigReader& c, const std::string& key) {
  ShiftVector sv{c.points(key, {{0.75, 0.0}})};
  try {
    sv.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Validation, e.what());
  }
  return sv;
}

// ---------------------------------------------------------------- tables

CommandResult tables(ConfigReader& c, const Artifacts&) {
  const std::int64_t limit = c.integer("limit", 1'000'000);
  const std::string dir = c.string("cache_dir", "");
  if (limit < 2) fail(ErrorCode::Validation, "limit must be at least 2");
  c.finish();
  TableOptions opt;
  if (!dir.empty()) opt.cache_dir = dir;
  const auto table = build_mangoldt(limit, opt);
  std::int64_t powers = 0;
  double psi = 0.0;
  for (std::int64_t n = 2; n <= limit; ++n) {
    if (table(n) > 0.0) ++powers;
    psi += table(n);
  }
  const auto cache = resolve_cache_dir(opt);
  return {{{"limit", limit},
           {"primes", primes_up_to(limit).size()},
           {"prime_powers", powers},
           {"chebyshev_psi", psi},
           {"psi_over_limit", psi / static_cast<double>(limit)},
           {"cache_file", cache ? json(mangoldt_cache_file(*cache, limit).string()) : json(nullptr)}}};
}

// ---------------------------------------------------------------- zeta

CommandResult zeta_points(ConfigReader& c, const Artifacts& out) {
  std::vector<ComplexPoint> pts;
  if (c.has("sigma") || c.has("t")) {
    pts.emplace_back(c.number("sigma", 2.0), c.number("t", 0.0));
  } else {
    pts = c.points("points", {{2.0, 0.0}});
  }
  EvalSettings settings;
  settings.target_abs_err = c.number("target_abs_err", settings.target_abs_err);
  c.finish();
  try {
    settings.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Validation, e.what());
  }
  std::ostringstream csv;
  csv << "sigma,t,zeta_re,zeta_im,dzeta_re,dzeta_im,log_re,log_im\n";
  json rows = json::array();
  for (const auto& s : pts) {
    const cplx z = zeta(s, settings);
    const cplx dz = zeta_prime(s, settings);
    json row = {{"sigma", s.re}, {"t", s.im}, {"zeta", complex_json(z)}, {"zeta_prime", complex_json(dz)}};
    cplx lz{std::nan(""), std::nan("")};
    try {
      lz = log_zeta(s, settings);
      row["log_zeta"] = complex_json(lz);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroOnPath) throw;
      row["log_zeta"] = nullptr;
      row["zero_on_path"] = true;
    }
    rows.push_back(row);
    csv << cell(s.re) << ',' << cell(s.im) << ',' << cell(z.real()) << ',' << cell(z.imag()) << ','
        << cell(dz.real()) << ',' << cell(dz.imag()) << ',' << cell(lz.real()) << ',' << cell(lz.imag())
        << '\n';
  }
  out.write_text("csv", csv.str());
  return {{{"points", rows}}};
}

// ---------------------------------------------------------------- moments

CommandResult moments(ConfigReader& c, const Artifacts&) {
  const auto grid = read_window(c, 0.05);
  const auto sv = read_shifts(c, "s_shifts");
  const auto rv = read_shifts(c, "r_shifts");
  const std::int64_t x = c.integer("x", 100'000);
  const auto run = read_run(c, 20'000);
  c.finish();
  if (x < 2) fail(ErrorCode::Validation, "x must be at least 2");

  const auto s_side = sample_shifts(grid, sv);
  const auto r_side = sample_reflected(grid, rv);
  const auto gm = grid_moment(s_side, r_side);
  const auto table = build_mangoldt(x);
  const auto diag = diagonal_mean(sv, rv, x, table);

  std::vector<ComplexPoint> pts = sv.shifts;
  for (const auto& r : rv.shifts) pts.push_back(r.conj());
  const EulerRows rows(pts, run.P);
  const std::size_t k = sv.size();
  auto f = [&](const RandomSample& sample, std::span<double> o) {
    std::vector<cplx> v(pts.size());
    rows.log_zeta(sample, v);
    cplx prod{1.0, 0.0};
    for (std::size_t j = 0; j < v.size(); ++j) prod *= j < k ? v[j] : std::conj(v[j]);
    o[0] = prod.real();
    o[1] = prod.imag();
  };
  const auto mc = mc_expectation(f, 2, run.samples, run.seed, run.P);

  return {{{"grid",
            {{"value", complex_json(gm.value)},
             {"used", gm.used},
             {"masked_fraction_s", s_side.masked_fraction()},
             {"masked_fraction_r", r_side.masked_fraction()}}},
           {"diagonal",
            {{"value", complex_json(diag.value)},
             {"tail_bound", diag.tail_bound},
             {"sharp_tail", nullable(diag.sharp_tail)}}},
           {"model",
            {{"value", complex_json({mc[0].mean, mc[1].mean})},
             {"se", std::hypot(mc[0].std_error, mc[1].std_error)}}},
           {"grid_minus_diagonal", std::abs(gm.value - diag.value)},
           {"model_minus_diagonal", std::abs(cplx(mc[0].mean, mc[1].mean) - diag.value)}}};
}

// ---------------------------------------------------------------- charfun

CommandResult charfun(ConfigReader& c, const Artifacts& out) {
  const auto grid = read_window(c, 0.05);
  const auto sv = read_shifts(c, "shifts");
  const double cap = c.number("cap", kDefaultCharFunCap);
  const double umax = c.number("u_max", 2.0);
  const double ustep = c.number("u_step", 0.25);
  const auto run = read_run(c, 20'000);
  c.finish();
  if (!(ustep > 0.0) || !(umax >= 0.0) || umax / ustep > 1000)
    fail(ErrorCode::Validation, "u_step must be positive and u_max / u_step at most 1000");
  if (umax > cap) fail(ErrorCode::Validation, "u_max exceeds the configured cap");

  // every shift receives the same (u, v)
  const auto n = static_cast<int>(std::floor(umax / ustep + 1e-9));
  std::vector<CharFunPoint> pts;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      pts.push_back({std::vector<double>(sv.size(), a * ustep), std::vector<double>(sv.size(), b * ustep)});

  const auto m = sample_shifts(grid, sv);
  const auto g = grid_char_fun(m, pts, cap);
  const auto r = model_char_fun(sv.shifts, pts, run, cap);
  std::ostringstream csv;
  csv << "u,v,grid_re,grid_im,model_re,model_im,model_se,abs_diff\n";
  double worst = 0.0, worst_se = 0.0, max_se = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(g[i] - r[i].mean);
    if (d > worst) {
      worst = d;
      worst_se = r[i].std_error;
      at = i;
    }
    max_se = std::max(max_se, r[i].std_error);
    csv << cell(pts[i].u[0]) << ',' << cell(pts[i].v[0]) << ',' << cell(g[i].real()) << ','
        << cell(g[i].imag()) << ',' << cell(r[i].mean.real()) << ',' << cell(r[i].mean.imag()) << ','
        << cell(r[i].std_error) << ',' << cell(d) << '\n';
  }
  out.write_text("csv", csv.str());
  return {{{"max_abs_diff", worst},
           {"at", {{"u", pts[at].u[0]}, {"v", pts[at].v[0]}}},
           {"se_at_max", worst_se},
           {"max_se", max_se},
           {"points", pts.size()},
           {"cap", cap},
           {"cap_note", "frequency box is a configured constant"},
           {"masked_fraction", m.masked_fraction()}}};
}

// ---------------------------------------------------------------- discrepancy

CommandResult discrepancy(ConfigReader& c, const Artifacts& out) {
  const auto grid = read_window(c, 0.05);
  const auto sv = read_shifts(c, "shifts");
  const std::int64_t count = c.integer("family_size", 100);
  const std::uint64_t fseed = c.seed("family_seed", 2024);
  const double lo = c.number("min_side", 0.05);
  const double hi = c.number("max_side", 5.0);
  const auto run = read_run(c, 20'000);
  c.finish();
  if (count < 1 || !(lo > 0.0) || !(lo <= hi))
    fail(ErrorCode::Validation, "family_size must be positive and 0 < min_side <= max_side");

  const auto m = sample_shifts(grid, sv);
  const auto family = random_rectangle_family(m, static_cast<std::size_t>(count), fseed, lo, hi);
  const auto d = discrepancy_over_family(m, family, run);
  std::ostringstream csv;
  csv << "index";
  for (std::size_t j = 0; j < sv.size(); ++j)
    csv << ",re_lo" << j << ",re_hi" << j << ",im_lo" << j << ",im_hi" << j;
  csv << ",grid,model,model_se,abs_diff\n";
  for (std::size_t k = 0; k < family.size(); ++k) {
    csv << k;
    for (const auto& r : family[k])
      csv << ',' << cell(r.re_lo) << ',' << cell(r.re_hi) << ',' << cell(r.im_lo) << ',' << cell(r.im_hi);
    csv << ',' << cell(d.grid[k]) << ',' << cell(d.model[k].mean) << ',' << cell(d.model[k].std_error)
        << ',' << cell(std::abs(d.grid[k] - d.model[k].mean)) << '\n';
  }
  out.write_text("csv", csv.str());
  return {{{"value", d.value},
           {"reference", nullable(d.reference)},
           {"ratio_to_reference", nullable(d.value / d.reference)},
           {"argmax", d.argmax},
           {"max_se", d.max_std_error},
           {"masked_fraction", m.masked_fraction()}}};
}

// ---------------------------------------------------------------- bs-check

// sgn interpolant from its defining series, summed pairwise in long double
double interpolant_series(double z, std::int64_t terms) {
  if (z == 0.0) return 0.0;
  long double s = 0.0L;
  for (std::int64_t n = terms; n >= 1; --n) {
    const long double a = static_cast<long double>(z) - n, b = static_cast<long double>(z) + n;
    s += 1.0L / (a * a) - 1.0L / (b * b);
  }
  s += 2.0L / z;
  const long double sp = std::sin(kPi * static_cast<long double>(z)) / kPi;
  return static_cast<double>(sp * sp * s);
}

CommandResult bs_check(ConfigReader& c, const Artifacts&) {
  const auto deltas = c.numbers("deltas", {1.0, 5.0, 25.0});
  const auto lengths = c.numbers("lengths", {0.1, 1.0, 10.0});
  const double lo = c.number("grid_lo", -50.0);
  const double hi = c.number("grid_hi", 50.0);
  const std::int64_t points = c.integer("grid_points", 10'000);
  const std::int64_t series_points = c.integer("series_points", 20);
  const std::int64_t series_terms = c.integer("series_terms", 1'000'000);
  const std::uint64_t seed = c.seed("seed", 1);
  const auto xis = c.numbers("xi_list", {0.0, 0.25, 0.5, 0.75, 1.0, 1.5});
  c.finish();
  if (!(lo < hi) || points < 2 || series_points < 0 || series_terms < 1)
    fail(ErrorCode::Validation, "bs-check: need grid_lo < grid_hi, grid_points >= 2, series_terms >= 1");
  for (double d : deltas)
    if (!(d > 0.0)) fail(ErrorCode::Validation, "bs-check: deltas must be positive");
  for (double l : lengths)
    if (!(l > 0.0)) fail(ErrorCode::Validation, "bs-check: lengths must be positive");

  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double worst, double tol) {
    const bool ok = worst <= tol;
    all = all && ok;
    checks.push_back({{"name", name}, {"worst", worst}, {"tolerance", tol}, {"passed", ok}});
  };
  auto xgrid = [&](std::int64_t i) { return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1); };

  double sandwich = 0.0, identity = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    const double x = xgrid(i);
    const double sg = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    sandwich = std::max({sandwich, sgn_minorant(x) - sg, sg - sgn_majorant(x)});
    identity = std::max(identity, std::abs(sgn_majorant(x) - sgn_minorant(x) - 2.0 * fejer_kernel(x)));
  }
  record("sgn_sandwich", sandwich, 1e-12);
  record("majorant_minus_minorant_is_2K", identity, 1e-14);

  double bound = 0.0, l1 = 0.0;
  for (double delta : deltas) {
    for (double len : lengths) {
      const Interval I{0.123 - len / 2, 0.123 + len / 2};
      const Smoothing d{delta};
      for (std::int64_t i = 0; i < points; ++i) {
        const double x = xgrid(i);
        const double f = smoothed_indicator(x, I, d);
        const double gap = (I.contains(x) ? 1.0 : 0.0) - f;
        const double k = fejer_kernel(delta * (x - I.a)) + fejer_kernel(delta * (I.b - x));
        bound = std::max(bound, std::abs(f) - 1.0);
        l1 = std::max({l1, -gap, gap - k});
      }
    }
  }
  record("smoothed_indicator_bounded_by_1", std::max(bound, 0.0), 1e-12);
  record("indicator_sandwich", std::max(l1, 0.0), 1e-12);

  double range = 0.0, incr = 0.0;
  double prev = interpolant_defect(0.0);
  for (std::int64_t i = 0; i < points; ++i) {
    const double y = 50.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    const double g = interpolant_defect(y);
    range = std::max({range, -g, g - 1.0});
  }
  for (std::int64_t i = 1; i <= points; ++i) {
    const double g = interpolant_defect(static_cast<double>(i) / static_cast<double>(points));
    incr = std::max(incr, g - prev);
    prev = g;
  }
  record("defect_in_unit_interval", std::max(range, 0.0), 1e-15);
  record("defect_decreasing_on_0_1", std::max(incr, 0.0), 0.0);

  std::mt19937_64 rng(seed);
  std::vector<double> xs = {0.0, 0.3, 1.7, 4.2};
  for (std::int64_t i = 0; i < series_points; ++i)
    xs.push_back(-30.0 + 60.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
  double series = 0.0;
  for (double x : xs) series = std::max(series, std::abs(sgn_interpolant(x) - interpolant_series(x, series_terms)));
  record("interpolant_vs_series", series, 1e-8);

  double quad = 0.0;
  for (double xi : xis) quad = std::max(quad, std::abs(fejer_transform_numeric(xi) - fejer_transform(xi)));
  record("fejer_transform_quadrature", quad, 1e-4);

  return {{{"checks", checks}, {"all_passed", all}}, all};
}

// ---------------------------------------------------------------- deriv-tails

CommandResult deriv_tails(ConfigReader& c, const Artifacts& out) {
  const auto grid = read_window(c, 0.1);
  const double radius = c.number("radius", 0.1);
  const auto V = c.numbers("V_list", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  const std::int64_t bp = c.integer("boundary_points", 16);
  const auto run = read_run(c, 10'000);
  c.finish();
  if (!(radius > 0.0 && radius < 0.25)) fail(ErrorCode::Validation, "radius must lie in (0, 1/4)");
  if (V.empty() || !std::is_sorted(V.begin(), V.end())) fail(ErrorCode::Validation, "V_list must be increasing");
  if (bp < 1 || bp > 4096) fail(ErrorCode::Validation, "boundary_points must lie in [1, 4096]");

  const auto tab = deriv_tail_probabilities(grid, radius, V, static_cast<int>(bp), run);
  std::ostringstream csv;
  csv << "V,grid_fraction,model,model_se,reference_shape\n";
  json rows = json::array();
  for (const auto& r : tab.rows) {
    csv << cell(r.V) << ',' << cell(r.grid_fraction) << ',' << cell(r.model.mean) << ','
        << cell(r.model.std_error) << ',' << cell(r.reference_shape) << '\n';
    rows.push_back({{"V", r.V},
                    {"grid_fraction", r.grid_fraction},
                    {"model", r.model.mean},
                    {"model_se", r.model.std_error},
                    {"reference_shape", nullable(r.reference_shape)}});
  }
  out.write_text("csv", csv.str());
  return {{{"radius", tab.radius},
           {"sigma_r", tab.sigma_r},
           {"boundary_points", tab.boundary_points},
           {"grid_masked_fraction", tab.grid_masked_fraction},
           {"rows", rows}}};
}

// ---------------------------------------------------------------- scan

CommandResult scan(ConfigReader& c, const Artifacts& out) {
  const auto cfg = ScanConfig::from_json(c.take_all());
  c.set_resolved(cfg.to_json());
  const auto rep = universality_report(cfg);
  rep.write_csv(out.path("csv"));
  return {rep.to_json()};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"tables",      "zeta",     "moments",     "charfun",
                                                 "discrepancy", "bs-check", "deriv-tails", "scan"};
  return names;
}

CommandResult run_command(const std::string& name, ConfigReader& config, const Artifacts& out) {
  if (name == "tables") return tables(config, out);
  if (name == "zeta") return zeta_points(config, out);
  if (name == "moments") return moments(config, out);
  if (name == "charfun") return charfun(config, out);
  if (name == "discrepancy") return discrepancy(config, out);
  if (name == "bs-check") return bs_check(config, out);
  if (name == "deriv-tails") return deriv_tails(config, out);
  if (name == "scan") return scan(config, out);
  fail(ErrorCode::Validation, "unknown subcommand " + name);
}

}  // namespace unilab::cli
