#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dcurve {

using Complex = std::complex<double>;

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numeric {

/// Rising factorial (x)_k = x (x+1) ... (x+k-1), (x)_0 = 1.
inline double rising(double x, int k) noexcept {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= x + j;
  return r;
}

inline double factorial(int k) noexcept { return rising(1.0, k); }

/// z^k for k >= 0 by repeated squaring.
inline Complex ipow(Complex z, int k) noexcept {
  Complex r(1.0, 0.0);
  for (; k > 0; k >>= 1, z *= z)
    if (k & 1) r *= z;
  return r;
}

/// Shortest round-trip decimal form; locale independent.
inline std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline double beta_function(double a, double b) { return boost::math::beta(a, b); }

/// Regularized incomplete beta I_x(a, b).
inline double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

/// 1 - I_x(a, b), computed without cancellation.
inline double beta_sf(double a, double b, double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return boost::math::ibetac(a, b, x);
}

inline double beta_pdf(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return boost::math::ibeta_derivative(a, b, x);
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

/// Two-sided normal critical value for the given confidence, e.g. 0.95 -> 1.96.
inline double two_sided_z(double confidence) { return normal_quantile(0.5 + 0.5 * confidence); }

namespace detail {

// One engine per thread: the abscissa tables grow lazily on first use.
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_engine() {
  thread_local boost::math::quadrature::tanh_sinh<double> engine(15);
  return engine;
}

inline void check_convergence(double error, double l1, double tol, const char* where) {
  if (!(error <= tol * std::max(1.0, l1))) {
    throw QuadratureError(std::string(where) + ": quadrature did not converge (error estimate " +
                          std::to_string(error) + ")");
  }
}

}  // namespace detail

/// Integral over (0,1) of f(u, v) where v = 1 - u; both arguments are
/// accurate near their own endpoint. Tanh-sinh, so integrable endpoint
/// singularities (u^{-1/2}, log u) are handled.
template <class F>
double integrate_unit(F&& f, double tol, const char* where = "integrate_unit") {
  double error = 0.0, l1 = 0.0;
  // The engine works on (-1,1) and passes zc = -(1+z) left of 0, 1-z right of 0.
  const double value = detail::tanh_sinh_engine().integrate(
      [&](double z, double zc) {
        if (z < 0.0) {
          const double u = -0.5 * zc;
          return f(u, 1.0 - u);
        }
        const double v = 0.5 * zc;
        return f(1.0 - v, v);
      },
      tol, &error, &l1);
  detail::check_convergence(0.5 * error, 0.5 * l1,
                            std::max(tol, 1e3 * std::numeric_limits<double>::epsilon()), where);
  return 0.5 * value;
}

/// Same as integrate_unit for a complex integrand (real and imaginary parts
/// integrated separately).
template <class F>
Complex integrate_unit_complex(F&& f, double tol, const char* where = "integrate_unit") {
  const double re = integrate_unit([&](double u, double v) { return f(u, v).real(); }, tol, where);
  const double im = integrate_unit([&](double u, double v) { return f(u, v).imag(); }, tol, where);
  return {re, im};
}

/// Tanh-sinh over a finite interval [a, b] for a plain f(x).
template <class F>
double integrate_interval(F&& f, double a, double b, double tol, const char* where = "integrate_interval") {
  if (a == b) return 0.0;
  const double width = b - a;
  return width * integrate_unit(
                     [&](double u, double v) { return u <= v ? f(a + width * u) : f(b - width * v); }, tol, where);
}

/// Adaptive Gauss-Kronrod (15/31 point) for smooth integrands.
template <class F>
double integrate_smooth(F&& f, double a, double b, double tol, double* error = nullptr) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double x) { return f(x); }, a, b, 15, tol, &err);
  if (error) *error = err;
  return value;
}

}  // namespace numeric
}  // namespace dcurve
