#pragma once

// Reference values computed without the library: Lentz continued fraction for
// the incomplete beta, composite Simpson, closed-form beta moments.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace oracle {

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace detail {

inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) return h;
  }
  throw std::runtime_error("beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// E X^k for X ~ beta(a, b).
inline double beta_moment(double a, double b, int k) {
  double m = 1.0;
  for (int i = 0; i < k; ++i) m *= (a + i) / (a + b + i);
  return m;
}

/// E (X - c)_+ for X ~ beta(a, b).
inline double beta_hinge(double a, double b, double c) {
  if (c <= 0.0) return a / (a + b) - c;
  if (c >= 1.0) return 0.0;
  return a / (a + b) * (1.0 - beta_cdf(a + 1.0, b, c)) - c * (1.0 - beta_cdf(a, b, c));
}

/// Composite Simpson on [a, b] with 2m panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
  const double h = (b - a) / (2.0 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Density of mu(alpha) for alpha uniform on (0,1): (e/pi) sin(pi x) x^{-x} (1-x)^{-(1-x)}.
inline double dk_density(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::numbers::e / std::numbers::pi * std::sin(std::numbers::pi * x) *
         std::exp(-x * std::log(x) - (1.0 - x) * std::log(1.0 - x));
}

}  // namespace oracle
