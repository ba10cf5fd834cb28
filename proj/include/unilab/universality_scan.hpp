#pragma once

// Distance between zeta(3/4 + it + z) and a target f(z) on the disc |z| <= r:
// certified brackets from a boundary cover plus a derivative majorant, the
// measure of good t, the omega-weighted statistic, and the same quantities
// for the random Euler product.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "unilab/distribution_lab.hpp"
#include "unilab/types.hpp"
#include "unilab/zeta_eval.hpp"

namespace unilab {

/// Nonvanishing holomorphic target on |z| <= radius_big = (r + 1/4)/2.
class TargetFunction {
 public:
  enum class Kind { Constant, ExpPolynomial, ShiftedZeta };

  /// f = c, c != 0.
  static TargetFunction constant(cplx c, double r);
  /// f = exp(g_0 + g_1 z + ... + g_d z^d).
  static TargetFunction exp_polynomial(std::vector<cplx> coefficients, double r);
  /// Test hook: f(z) = zeta(3/4 + i t0 + z), so the distance vanishes at t0.
  static TargetFunction shifted_zeta(double t0, double r, const EvalSettings& settings = {});

  /// {"kind": "constant", "value": [re, im]} or
  /// {"kind": "exp_polynomial", "coefficients": [[re, im], ...]}.
  static TargetFunction from_json(const nlohmann::json& spec, double r);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  double radius_big() const { return radius_big_; }
  /// max |f'| on |z| <= radius_big, from 4096 boundary samples.
  double derivative_bound() const { return L_; }

  cplx value(cplx z) const;
  cplx derivative(cplx z) const;

 private:
  TargetFunction(Kind kind, double r);
  void finish();

  Kind kind_;
  double radius_big_;
  double L_ = 0.0;
  cplx c_{1.0, 0.0};
  std::vector<cplx> g_;
  double t0_ = 0.0;
  EvalSettings settings_;
};

/// J points z_j = r exp(2 pi i (phase + j / J)) on |z| = r; doubling J keeps
/// every point.
struct CoverSpec {
  double r = 0.05;
  int J = 64;
  double phase = 0.0;  // in turns

  cplx point(int j) const;
  std::vector<cplx> points() const;
  /// 2 r sin(pi / (2J)): farthest a boundary point is from its nearest cover point.
  double spacing() const;
  void validate() const;
};

/// 1 on [0, eps], cubic C^1 ramp 2u^3 - 3u^2 + 1 (u = (x - eps)/eta) down to
/// 0 at eps + eta, 0 beyond. Dominates the indicator of (0, eps).
struct WeightFunction {
  double eps = 0.8;
  double eta = 0.2;

  double operator()(double x) const;
  double derivative(double x) const;
  void validate() const;
};

/// max_j |zeta(3/4 + it + z_j) - f(z_j)|: a lower bound for the disc maximum.
double cover_max_distance(double t, const TargetFunction& f, const CoverSpec& cover,
                          const EvalSettings& settings = {});

/// Sampled max |zeta'(center + it + z)| over n_samples points of |z| = rho,
/// inflated by half the sample arc times twice the largest difference
/// quotient between neighbouring samples. Heuristic upper bound.
double deriv_majorant(double t, double rho, int n_samples, const EvalSettings& settings = {},
                      double center = 0.75);

/// Same inflation applied to derivative values at equally spaced points of |z| = rho.
double majorant_from_samples(std::span<const cplx> derivatives, double rho);

struct Bracket {
  double low = 0.0;
  double high = 0.0;
  double mid() const { return 0.5 * (low + high); }
};

/// [low, low + spacing (majorant + L)], majorant taken at radius_big.
Bracket disc_max_bracket(double t, const TargetFunction& f, const CoverSpec& cover,
                         double majorant, const EvalSettings& settings = {});
Bracket bracket_from(double low, double majorant, const TargetFunction& f, const CoverSpec& cover);

/// Per-sample brackets: grid points (t-side) or model draws (random side).
struct ScanSamples {
  std::vector<double> t;         // empty on the random side
  std::vector<Bracket> brackets;
  std::vector<double> majorant;
  std::vector<std::uint8_t> mask;

  std::int64_t size() const { return static_cast<std::int64_t>(brackets.size()); }
  double masked_fraction() const;
};

/// Brackets for every grid point; zeta values and derivative samples come from
/// multi-row sweeps. Non-finite points are masked.
ScanSamples scan_grid(const GridSweep& grid, const TargetFunction& f, const CoverSpec& cover,
                      int majorant_samples = 32, const EvalSettings& settings = {});

/// Same for the random Euler product over the run's samples.
ScanSamples scan_model(const TargetFunction& f, const CoverSpec& cover, const ModelRun& run,
                       int majorant_samples = 32);

struct MeasureEstimate {
  double inner = 0.0;  // fraction with high < eps
  double outer = 0.0;  // fraction with low < eps
};

MeasureEstimate measure_estimate(const ScanSamples& scan, double eps);

struct OmegaStatistic {
  double value = 0.0;        // average of omega(mid)
  double uncertainty = 0.0;  // average of |omega(high) - omega(low)|
  double std_error = 0.0;    // sample std / sqrt(n); meaningful on the random side
};

OmegaStatistic omega_statistic(const ScanSamples& scan, const WeightFunction& w);

struct MaxCompareRow {
  double u = 0.0;
  double grid = 0.0;  // fraction with cover max <= u
  McResult model;
  double reference = 0.0;
};

/// P(max_j |...| <= u) on both sides, with (J log log T)^{6/5} / (log T)^{(3/4-r)/5}.
std::vector<MaxCompareRow> distribution_max_compare(const ScanSamples& grid_side,
                                                    const ScanSamples& model_side,
                                                    const std::vector<double>& u_list,
                                                    const CoverSpec& cover, double T);

struct ScanConfig {
  double T = 1e4;
  double step = 0.1;
  nlohmann::json target = {{"kind", "constant"}, {"value", {1.2, 0.0}}};
  CoverSpec cover;
  WeightFunction weight;
  std::vector<double> eps_list = {0.4, 0.8, 1.2};
  std::vector<double> u_list = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  ModelRun run{10'000, 1, 100'000};
  int majorant_samples = 32;

  static ScanConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct ScanReport {
  ScanConfig config;
  OmegaStatistic lhs;
  OmegaStatistic rhs;
  double diff = 0.0;
  double rate_context = 0.0;
  double masked_fraction = 0.0;
  double model_tail_std = 0.0;
  std::vector<std::pair<double, MeasureEstimate>> measures;
  std::vector<MaxCompareRow> max_compare;
  /// Empirical CDF of the random-side cover maximum at 21 quantile levels.
  std::vector<std::pair<double, double>> model_quantiles;
  ScanSamples grid_samples;

  nlohmann::json to_json() const;
  /// t, m_low, m_high, majorant, masked
  void write_csv(const std::filesystem::path& path) const;
};

/// (log T)^{-(3/4 - r)/11}.
double rate_context(double T, double r);

ScanReport universality_report(const ScanConfig& config, const EvalSettings& settings = {});

}  // namespace unilab
