#include "unilab/universality_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "unilab/error.hpp"
#include "unilab/parallel.hpp"

namespace unilab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTargetBoundarySamples = 4096;

cplx complex_from_json(const nlohmann::json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::Validation, std::string(what) + ": expected a number or [re, im]");
}

nlohmann::json complex_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* where) {
  if (!j.is_object()) fail(ErrorCode::Validation, std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key()))
      fail(ErrorCode::Validation, std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Validation, std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<ComplexPoint> circle_points(double center, double rho, int n) {
  std::vector<ComplexPoint> out;
  for (int k = 0; k < n; ++k) {
    const cplx z = std::polar(rho, 2.0 * kPi * k / n);
    out.emplace_back(center + z.real(), z.imag());
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  const double n = static_cast<double>(v.size());
  out.mean = pairwise_sum(v) / n;
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - out.mean) * (v[i] - out.mean);
  out.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TargetFunction::TargetFunction(Kind kind, double r) : kind_(kind), radius_big_(0.5 * (r + 0.25)) {
  require(r > 0.0 && r < 0.25, "TargetFunction: r must lie in (0, 1/4)");
}

void TargetFunction::finish() {
  double L = 0.0;
  for (int k = 0; k < kTargetBoundarySamples; ++k)
    L = std::max(L, std::abs(derivative(std::polar(radius_big_, 2.0 * kPi * k / kTargetBoundarySamples))));
  L_ = L;
}

TargetFunction TargetFunction::constant(cplx c, double r) {
  require(c != cplx(0.0, 0.0) && std::isfinite(std::abs(c)), "TargetFunction: constant must be nonzero");
  TargetFunction f(Kind::Constant, r);
  f.c_ = c;
  f.finish();
  return f;
}

TargetFunction TargetFunction::exp_polynomial(std::vector<cplx> coefficients, double r) {
  require(!coefficients.empty(), "TargetFunction: exp-polynomial needs coefficients");
  for (const auto& g : coefficients)
    require(std::isfinite(g.real()) && std::isfinite(g.imag()), "TargetFunction: non-finite coefficient");
  TargetFunction f(Kind::ExpPolynomial, r);
  f.g_ = std::move(coefficients);
  f.finish();
  return f;
}

TargetFunction TargetFunction::shifted_zeta(double t0, double r, const EvalSettings& settings) {
  TargetFunction f(Kind::ShiftedZeta, r);
  f.t0_ = t0;
  f.settings_ = settings;
  f.finish();
  return f;
}

TargetFunction TargetFunction::from_json(const nlohmann::json& spec, double r) {
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
    fail(ErrorCode::Validation, "target: expected an object with a string 'kind'");
  const auto kind = spec["kind"].get<std::string>();
  if (kind == "constant") {
    reject_unknown(spec, {"kind", "value"}, "target");
    if (!spec.contains("value")) fail(ErrorCode::Validation, "target: constant needs 'value'");
    const cplx c = complex_from_json(spec["value"], "target.value");
    if (c == cplx(0.0, 0.0)) fail(ErrorCode::Validation, "target: constant must be nonzero");
    return constant(c, r);
  }
  if (kind == "exp_polynomial") {
    reject_unknown(spec, {"kind", "coefficients"}, "target");
    if (!spec.contains("coefficients") || !spec["coefficients"].is_array() || spec["coefficients"].empty())
      fail(ErrorCode::Validation, "target: exp_polynomial needs a nonempty 'coefficients' array");
    std::vector<cplx> g;
    for (const auto& c : spec["coefficients"]) g.push_back(complex_from_json(c, "target.coefficients"));
    return exp_polynomial(std::move(g), r);
  }
  fail(ErrorCode::Validation, "target: unknown kind '" + kind + "'");
}

nlohmann::json TargetFunction::to_json() const {
  switch (kind_) {
    case Kind::Constant:
      return {{"kind", "constant"}, {"value", complex_to_json(c_)}};
    case Kind::ExpPolynomial: {
      auto arr = nlohmann::json::array();
      for (const auto& g : g_) arr.push_back(complex_to_json(g));
      return {{"kind", "exp_polynomial"}, {"coefficients", arr}};
    }
    case Kind::ShiftedZeta:
      return {{"kind", "shifted_zeta"}, {"t0", t0_}};
  }
  return {};
}

cplx TargetFunction::value(cplx z) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::ExpPolynomial: {
      cplx p{0.0, 0.0};
      for (auto it = g_.rbegin(); it != g_.rend(); ++it) p = p * z + *it;
      return std::exp(p);
    }
    case Kind::ShiftedZeta:
      return zeta({0.75 + z.real(), t0_ + z.imag()}, settings_);
  }
  return {};
}

cplx TargetFunction::derivative(cplx z) const {
  switch (kind_) {
    case Kind::Constant:
      return {0.0, 0.0};
    case Kind::ExpPolynomial: {
      cplx dp{0.0, 0.0};
      for (std::size_t k = g_.size(); k-- > 1;) dp = dp * z + static_cast<double>(k) * g_[k];
      return dp * value(z);
    }
    case Kind::ShiftedZeta:
      return zeta_prime({0.75 + z.real(), t0_ + z.imag()}, settings_);
  }
  return {};
}

cplx CoverSpec::point(int j) const {
  return std::polar(r, 2.0 * kPi * (phase + static_cast<double>(j) / J));
}

std::vector<cplx> CoverSpec::points() const {
  std::vector<cplx> out;
  for (int j = 0; j < J; ++j) out.push_back(point(j));
  return out;
}

double CoverSpec::spacing() const { return 2.0 * r * std::sin(kPi / (2.0 * J)); }

void CoverSpec::validate() const {
  require(r > 0.0 && r < 0.25, "cover: r must lie in (0, 1/4)");
  require(J >= 1, "cover: J must be positive");
  require(std::isfinite(phase), "cover: phase must be finite");
}

double WeightFunction::operator()(double x) const {
  if (x <= eps) return 1.0;
  if (x >= eps + eta) return 0.0;
  const double u = (x - eps) / eta;
  return (2.0 * u - 3.0) * u * u + 1.0;
}

double WeightFunction::derivative(double x) const {
  if (x <= eps || x >= eps + eta) return 0.0;
  const double u = (x - eps) / eta;
  return 6.0 * u * (u - 1.0) / eta;
}

void WeightFunction::validate() const {
  require(eps > 0.0 && eta > 0.0 && std::isfinite(eps + eta), "weight: eps and eta must be positive");
}

double cover_max_distance(double t, const TargetFunction& f, const CoverSpec& cover,
                          const EvalSettings& settings) {
  cover.validate();
  double m = 0.0;
  for (int j = 0; j < cover.J; ++j) {
    const cplx z = cover.point(j);
    m = std::max(m, std::abs(zeta({0.75 + z.real(), t + z.imag()}, settings) - f.value(z)));
  }
  return m;
}

double majorant_from_samples(std::span<const cplx> d, double rho) {
  const std::size_t n = d.size();
  require(n >= 2, "derivative majorant needs at least 2 boundary samples");
  const double chord = 2.0 * rho * std::sin(kPi / static_cast<double>(n));
  double mx = 0.0, lip = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx = std::max(mx, std::abs(d[k]));
    lip = std::max(lip, std::abs(d[(k + 1) % n] - d[k]) / chord);
  }
  return mx + (kPi * rho / static_cast<double>(n)) * 2.0 * lip;
}

double deriv_majorant(double t, double rho, int n_samples, const EvalSettings& settings,
                      double center) {
  require(rho > 0.0 && rho < 0.5, "deriv_majorant: rho must lie in (0, 1/2)");
  std::vector<cplx> d;
  for (const auto& p : circle_points(center, rho, n_samples))
    d.push_back(zeta_prime({p.re, t + p.im}, settings));
  return majorant_from_samples(d, rho);
}

Bracket bracket_from(double low, double majorant, const TargetFunction& f, const CoverSpec& cover) {
  return {low, low + cover.spacing() * (majorant + f.derivative_bound())};
}

Bracket disc_max_bracket(double t, const TargetFunction& f, const CoverSpec& cover, double majorant,
                         const EvalSettings& settings) {
  require(majorant >= 0.0, "disc_max_bracket: majorant must be nonnegative");
  return bracket_from(cover_max_distance(t, f, cover, settings), majorant, f, cover);
}

double ScanSamples::masked_fraction() const {
  if (mask.empty()) return 0.0;
  return static_cast<double>(std::count(mask.begin(), mask.end(), std::uint8_t{1})) /
         static_cast<double>(mask.size());
}

ScanSamples scan_grid(const GridSweep& grid, const TargetFunction& f, const CoverSpec& cover,
                      int majorant_samples, const EvalSettings& settings) {
  cover.validate();
  grid.validate();
  require(majorant_samples >= 2, "scan_grid: need at least 2 majorant samples");
  const auto zs = cover.points();
  std::vector<ComplexPoint> cover_pts;
  std::vector<cplx> fz;
  for (const auto& z : zs) {
    cover_pts.emplace_back(0.75 + z.real(), z.imag());
    fz.push_back(f.value(z));
  }
  const double rho = f.radius_big();
  const auto maj_pts = circle_points(0.75, rho, majorant_samples);

  const auto n = static_cast<std::size_t>(grid.count);
  ScanSamples out;
  out.t.resize(n);
  out.brackets.resize(n);
  out.majorant.resize(n);
  out.mask.assign(n, 0);
  std::vector<double> low(n);
  for (std::size_t m = 0; m < n; ++m) out.t[m] = grid.at(static_cast<std::int64_t>(m));

  GridZeta(grid, cover_pts, settings, false).run([&](const SweepBlock& b) {
    for (std::int64_t i = 0; i < b.steps; ++i) {
      double mx = 0.0;
      for (std::size_t j = 0; j < zs.size(); ++j) mx = std::max(mx, std::abs(b.at(j, i) - fz[j]));
      low[static_cast<std::size_t>(b.m0 + i)] = mx;
    }
  });
  GridZeta(grid, maj_pts, settings, true).run([&](const SweepBlock& b) {
    std::vector<cplx> d(maj_pts.size());
    for (std::int64_t i = 0; i < b.steps; ++i) {
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = b.at(maj_pts.size() + k, i);
      out.majorant[static_cast<std::size_t>(b.m0 + i)] = majorant_from_samples(d, rho);
    }
  });
  for (std::size_t m = 0; m < n; ++m) {
    out.brackets[m] = bracket_from(low[m], out.majorant[m], f, cover);
    if (!std::isfinite(out.brackets[m].high)) out.mask[m] = 1;
  }
  return out;
}

ScanSamples scan_model(const TargetFunction& f, const CoverSpec& cover, const ModelRun& run,
                       int majorant_samples) {
  cover.validate();
  run.validate();
  require(majorant_samples >= 2, "scan_model: need at least 2 majorant samples");
  const auto zs = cover.points();
  std::vector<ComplexPoint> pts;
  std::vector<cplx> fz;
  for (const auto& z : zs) {
    pts.emplace_back(0.75 + z.real(), z.imag());
    fz.push_back(f.value(z));
  }
  const double rho = f.radius_big();
  for (const auto& p : circle_points(0.75, rho, majorant_samples)) pts.push_back(p);
  const EulerRows rows(pts, run.P);

  const auto n = static_cast<std::size_t>(run.samples);
  ScanSamples out;
  out.brackets.resize(n);
  out.majorant.resize(n);
  out.mask.assign(n, 0);
  const std::int64_t n_chunks = (run.samples + kMcChunk - 1) / kMcChunk;
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    const std::int64_t i0 = c * kMcChunk;
    const std::int64_t i1 = std::min(run.samples, i0 + kMcChunk);
    RandomSample sample = draw_sample(sample_seed(run.seed, i0), run.P);
    std::vector<cplx> val(pts.size()), der(pts.size());
    for (std::int64_t i = i0; i < i1; ++i) {
      if (i > i0) resample(sample, sample_seed(run.seed, i));
      rows.zeta(sample, val, der);
      double mx = 0.0;
      for (std::size_t j = 0; j < zs.size(); ++j) mx = std::max(mx, std::abs(val[j] - fz[j]));
      const auto idx = static_cast<std::size_t>(i);
      out.majorant[idx] = majorant_from_samples(std::span<const cplx>(der).subspan(zs.size()), rho);
      out.brackets[idx] = bracket_from(mx, out.majorant[idx], f, cover);
      if (!std::isfinite(out.brackets[idx].high)) out.mask[idx] = 1;
    }
  });
  return out;
}

MeasureEstimate measure_estimate(const ScanSamples& scan, double eps) {
  require(eps >= 0.0, "measure_estimate: eps must be nonnegative");
  std::vector<double> in, outv;
  for (std::size_t m = 0; m < scan.brackets.size(); ++m) {
    if (scan.mask[m]) continue;
    in.push_back(scan.brackets[m].high < eps ? 1.0 : 0.0);
    outv.push_back(scan.brackets[m].low < eps ? 1.0 : 0.0);
  }
  require(!in.empty(), "measure_estimate: every sample is masked");
  return {mean_and_se(in).mean, mean_and_se(outv).mean};
}

OmegaStatistic omega_statistic(const ScanSamples& scan, const WeightFunction& w) {
  w.validate();
  std::vector<double> mid, spread;
  for (std::size_t m = 0; m < scan.brackets.size(); ++m) {
    if (scan.mask[m]) continue;
    const auto& b = scan.brackets[m];
    mid.push_back(w(b.mid()));
    spread.push_back(std::abs(w(b.high) - w(b.low)));
  }
  require(mid.size() >= 2, "omega_statistic: need at least 2 unmasked samples");
  const auto ms = mean_and_se(mid);
  return {ms.mean, mean_and_se(spread).mean, ms.se};
}

std::vector<MaxCompareRow> distribution_max_compare(const ScanSamples& grid_side,
                                                    const ScanSamples& model_side,
                                                    const std::vector<double>& u_list,
                                                    const CoverSpec& cover, double T) {
  require(!u_list.empty() && std::is_sorted(u_list.begin(), u_list.end()),
          "distribution_max_compare: u_list must be increasing");
  std::vector<MaxCompareRow> out;
  const double lt = std::log(T);
  const double reference = T > std::numbers::e
                               ? std::pow(cover.J * std::log(lt), 1.2) / std::pow(lt, (0.75 - cover.r) / 5.0)
                               : std::numeric_limits<double>::quiet_NaN();
  for (double u : u_list) {
    std::vector<double> g, r;
    for (std::size_t m = 0; m < grid_side.brackets.size(); ++m)
      if (!grid_side.mask[m]) g.push_back(grid_side.brackets[m].low <= u ? 1.0 : 0.0);
    for (std::size_t m = 0; m < model_side.brackets.size(); ++m)
      if (!model_side.mask[m]) r.push_back(model_side.brackets[m].low <= u ? 1.0 : 0.0);
    require(!g.empty() && r.size() >= 2, "distribution_max_compare: not enough unmasked samples");
    const auto ms = mean_and_se(r);
    out.push_back({u, mean_and_se(g).mean, McResult{ms.mean, ms.se}, reference});
  }
  return out;
}

double rate_context(double T, double r) {
  require(T > 1.0, "rate_context: requires T > 1");
  return std::pow(std::log(T), -(0.75 - r) / 11.0);
}

ScanConfig ScanConfig::from_json(const nlohmann::json& j) {
  reject_unknown(j, {"T", "step", "target", "cover", "weight", "eps_list", "u_list", "run",
                     "majorant_samples"},
                 "scan config");
  ScanConfig c;
  c.T = get_or(j, "T", c.T);
  c.step = get_or(j, "step", c.step);
  if (j.contains("target")) c.target = j["target"];
  if (j.contains("cover")) {
    const auto& v = j["cover"];
    reject_unknown(v, {"r", "J", "phase"}, "scan config cover");
    c.cover.r = get_or(v, "r", c.cover.r);
    c.cover.J = get_or(v, "J", c.cover.J);
    c.cover.phase = get_or(v, "phase", c.cover.phase);
  }
  if (j.contains("weight")) {
    const auto& v = j["weight"];
    reject_unknown(v, {"eps", "eta"}, "scan config weight");
    c.weight.eps = get_or(v, "eps", c.weight.eps);
    c.weight.eta = get_or(v, "eta", c.weight.eta);
  }
  c.eps_list = get_or(j, "eps_list", c.eps_list);
  c.u_list = get_or(j, "u_list", c.u_list);
  if (j.contains("run")) {
    const auto& v = j["run"];
    reject_unknown(v, {"samples", "seed", "P"}, "scan config run");
    c.run.samples = get_or(v, "samples", c.run.samples);
    c.run.seed = get_or(v, "seed", c.run.seed);
    c.run.P = get_or(v, "P", c.run.P);
  }
  c.majorant_samples = get_or(j, "majorant_samples", c.majorant_samples);
  c.validate();
  return c;
}

nlohmann::json ScanConfig::to_json() const {
  return {{"T", T},
          {"step", step},
          {"target", target},
          {"cover", {{"r", cover.r}, {"J", cover.J}, {"phase", cover.phase}}},
          {"weight", {{"eps", weight.eps}, {"eta", weight.eta}}},
          {"eps_list", eps_list},
          {"u_list", u_list},
          {"run", {{"samples", run.samples}, {"seed", run.seed}, {"P", run.P}}},
          {"majorant_samples", majorant_samples}};
}

void ScanConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::Validation, "scan config: " + msg);
  };
  check(std::isfinite(T) && T > 10.0, "T must exceed 10");
  check(std::isfinite(step) && step > 0.0, "step must be positive");
  check(cover.r > 0.0 && cover.r < 0.25, "cover.r must lie in (0, 1/4)");
  check(cover.J >= 1, "cover.J must be positive");
  check(weight.eps > 0.0 && weight.eta > 0.0, "weight.eps and weight.eta must be positive");
  for (double e : eps_list) check(e >= 0.0, "eps_list entries must be nonnegative");
  check(!u_list.empty() && std::is_sorted(u_list.begin(), u_list.end()), "u_list must be increasing");
  check(run.samples >= 2, "run.samples must be at least 2");
  check(run.P >= 2, "run.P must be at least 2");
  check(majorant_samples >= 2, "majorant_samples must be at least 2");
  TargetFunction::from_json(target, cover.r);
}

nlohmann::json ScanReport::to_json() const {
  nlohmann::json measure = nlohmann::json::array();
  for (const auto& [eps, m] : measures) measure.push_back({{"eps", eps}, {"inner", m.inner}, {"outer", m.outer}});
  nlohmann::json compare = nlohmann::json::array();
  for (const auto& r : max_compare)
    compare.push_back({{"u", r.u}, {"grid", r.grid}, {"model", r.model.mean}, {"model_se", r.model.std_error},
                       {"reference", r.reference}});
  nlohmann::json cdf = nlohmann::json::array();
  for (const auto& [q, v] : model_quantiles) cdf.push_back({{"level", q}, {"value", v}});
  return {{"config", config.to_json()},
          {"lhs", {{"value", lhs.value}, {"uncertainty", lhs.uncertainty}}},
          {"rhs", {{"value", rhs.value}, {"se", rhs.std_error}, {"uncertainty", rhs.uncertainty}}},
          {"diff", diff},
          {"rate_context", rate_context},
          {"grid_stats", {{"masked_fraction", masked_fraction}, {"points", grid_samples.size()}}},
          {"model_tail_std", model_tail_std},
          {"measure", measure},
          {"max_compare", compare},
          {"model_cover_max_quantiles", cdf}};
}

void ScanReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot write " + path.string());
  os << "t,m_low,m_high,majorant,masked\n";
  for (std::int64_t m = 0; m < grid_samples.size(); ++m) {
    const auto i = static_cast<std::size_t>(m);
    os << fmt(grid_samples.t[i]) << ',' << fmt(grid_samples.brackets[i].low) << ','
       << fmt(grid_samples.brackets[i].high) << ',' << fmt(grid_samples.majorant[i]) << ','
       << int(grid_samples.mask[i]) << '\n';
  }
  if (!os) fail(ErrorCode::Io, "failed writing " + path.string());
}

ScanReport universality_report(const ScanConfig& config, const EvalSettings& settings) {
  config.validate();
  const auto f = TargetFunction::from_json(config.target, config.cover.r);
  ScanReport rep;
  rep.config = config;
  rep.grid_samples = scan_grid(GridSweep::window(config.T, config.step), f, config.cover,
                               config.majorant_samples, settings);
  const auto model = scan_model(f, config.cover, config.run, config.majorant_samples);
  rep.lhs = omega_statistic(rep.grid_samples, config.weight);
  rep.rhs = omega_statistic(model, config.weight);
  rep.diff = std::abs(rep.lhs.value - rep.rhs.value);
  rep.rate_context = rate_context(config.T, config.cover.r);
  rep.masked_fraction = rep.grid_samples.masked_fraction();
  rep.model_tail_std = tail_stats(0.75 - config.cover.r, config.run.P).main_tail_std;
  for (double eps : config.eps_list) rep.measures.emplace_back(eps, measure_estimate(rep.grid_samples, eps));
  rep.max_compare = distribution_max_compare(rep.grid_samples, model, config.u_list, config.cover, config.T);
  std::vector<double> lows;
  for (std::size_t m = 0; m < model.brackets.size(); ++m)
    if (!model.mask[m]) lows.push_back(model.brackets[m].low);
  std::sort(lows.begin(), lows.end());
  for (int k = 0; k <= 20; ++k) {
    const double q = k / 20.0;
    const auto idx = static_cast<std::size_t>(std::lround(q * static_cast<double>(lows.size() - 1)));
    rep.model_quantiles.emplace_back(q, lows[idx]);
  }
  return rep;
}

}  // namespace unilab
