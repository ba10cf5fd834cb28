#include "zeta_oracle.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace unilab::oracle {

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

struct mpc {
  mp re, im;
};

mpc operator+(const mpc& a, const mpc& b) { return {a.re + b.re, a.im + b.im}; }
mpc operator-(const mpc& a, const mpc& b) { return {a.re - b.re, a.im - b.im}; }
mpc operator*(const mpc& a, const mpc& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
mpc operator*(const mp& a, const mpc& b) { return {a * b.re, a * b.im}; }
mpc operator/(const mpc& a, const mpc& b) {
  const mp den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

std::complex<double> to_double(const mpc& z) {
  return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

// k^{-s} = exp(-sigma log k) (cos(t log k) - i sin(t log k))
mpc power_neg(const mp& log_k, const mp& sigma, const mp& t) {
  const mp mag = exp(-sigma * log_k);
  const mp ang = t * log_k;
  return {mag * cos(ang), -mag * sin(ang)};
}

const mp& log_int(int k) {
  static std::mutex mu;
  static std::vector<mp> cache;
  std::lock_guard lock(mu);
  while (static_cast<int>(cache.size()) <= k)
    cache.push_back(cache.empty() ? mp(0) : mp(log(mp(static_cast<int>(cache.size())))));
  return cache[static_cast<std::size_t>(k)];
}

}  // namespace

ZetaReference eta_zeta(double sigma_d, double t_d) {
  if (sigma_d <= 0.0) throw std::invalid_argument("eta_zeta: sigma must be positive");
  if (sigma_d == 1.0 && t_d == 0.0) throw std::invalid_argument("eta_zeta: pole");
  const double pi = 3.14159265358979323846;
  // |error| <~ 3 (1 + 2|t|) e^{pi|t|/2} / (3 + sqrt 8)^n ; aim at 1e-32.
  const double need = pi * std::abs(t_d) / 2.0 + std::log(3.0 * (1.0 + 2.0 * std::abs(t_d))) +
                      32.0 * std::log(10.0);
  const int n = static_cast<int>(std::ceil(need / std::log(3.0 + std::sqrt(8.0)))) + 20;

  // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
  std::vector<mp> d(static_cast<std::size_t>(n) + 1);
  mp term = mp(1) / mp(n);  // i = 0: (n-1)!/n! = 1/n
  mp acc = 0;
  for (int i = 0; i <= n; ++i) {
    acc += term;
    d[static_cast<std::size_t>(i)] = mp(n) * acc;
    if (i < n) term *= mp(4) * mp(n + i) * mp(n - i) / (mp(2 * i + 1) * mp(2 * i + 2));
  }
  const mp dn = d[static_cast<std::size_t>(n)];

  const mp sigma(sigma_d);
  const mp t(t_d);
  mpc eta{0, 0};
  mpc deta{0, 0};
  for (int k = 0; k < n; ++k) {
    const mp& lk = log_int(k + 1);
    const mpc p = power_neg(lk, sigma, t);
    mp w = d[static_cast<std::size_t>(k)] - dn;
    if (k % 2 == 1) w = -w;
    eta = eta + w * p;
    deta = deta + (-w * lk) * p;
  }
  const mp scale = mp(-1) / dn;
  eta = scale * eta;
  deta = scale * deta;

  // zeta = eta / D, D = 1 - 2^{1-s}, D' = 2^{1-s} log 2
  const mp l2 = log(mp(2));
  const mpc two_pow = power_neg(l2, sigma - mp(1), t);
  const mpc dd = mpc{mp(1), mp(0)} - two_pow;
  const mpc ddp = l2 * two_pow;
  const mpc z = eta / dd;
  const mpc zp = (deta * dd - eta * ddp) / (dd * dd);
  return {to_double(z), to_double(zp)};
}

std::complex<double> log_zeta_continued(double sigma, double t) {
  const double pi = 3.14159265358979323846;
  auto im_logderiv = [&](double x) {
    const ZetaReference r = eta_zeta(x, t);
    return (r.zeta_prime / r.zeta).imag();
  };
  // d/dx arg zeta(x + it) = Im(zeta'/zeta)
  auto simpson = [&](int panels) {
    const double h = (sigma - 2.0) / panels;
    double s = im_logderiv(2.0) + im_logderiv(sigma);
    for (int i = 1; i < panels; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * im_logderiv(2.0 + i * h);
    return s * h / 3.0;
  };
  const std::complex<double> z2 = eta_zeta(2.0, t).zeta;
  int panels = 16;
  double prev = simpson(panels);
  for (;;) {
    panels *= 2;
    const double cur = simpson(panels);
    if (std::abs(cur - prev) < 1e-6) {
      prev = cur;
      break;
    }
    if (panels > 4096) throw std::runtime_error("log_zeta_continued: no convergence");
    prev = cur;
  }
  const double tracked = std::arg(z2) + prev;
  const std::complex<double> z = eta_zeta(sigma, t).zeta;
  const double principal = std::arg(z);
  const double k = std::round((tracked - principal) / (2.0 * pi));
  return {std::log(std::abs(z)), principal + 2.0 * pi * k};
}

}  // namespace unilab::oracle
