#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "stickbreak.hpp"

namespace dcurve {

/// A point z with Im z > 0.
class UpperHalfPoint {
 public:
  explicit UpperHalfPoint(Complex z) : z_(z) {
    if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("UpperHalfPoint: Im z must be > 0");
  }
  UpperHalfPoint(double re, double im) : UpperHalfPoint(Complex(re, im)) {}

  Complex value() const noexcept { return z_; }

 private:
  Complex z_;
};

// Branch convention. For real w and Im z > 0, w - z has negative imaginary
// part, so std::log(w - z) stays on the principal branch (arg in (-pi, 0))
// and never meets the cut along the negative reals. The same holds for
// 1 - i s x with s != 0 away from x = 0, where the value is 1.

namespace detail {

inline Complex cauchy_parameter(const family::Cauchy1D& f) { return {f.location, f.scale}; }

inline void require_1d(const GoverningMeasure& alpha, const char* where) {
  if (alpha.dimension() != 1) throw std::invalid_argument(std::string(where) + ": alpha must be one-dimensional");
}

}  // namespace detail

/// y(z) = int alpha(dw) / (w - z).
inline Complex stieltjes(const GoverningMeasure& alpha, UpperHalfPoint z, double quadrature_tol = 1e-10) {
  detail::require_1d(alpha, "stieltjes");
  const Complex zz = z.value();
  if (const auto* f = alpha.as<family::Cauchy1D>()) return 1.0 / (std::conj(detail::cauchy_parameter(*f)) - zz);
  return expect(alpha, [&](double w) { return 1.0 / (w - zz); }, quadrature_tol);
}

/// Empirical average of 1 / (X_i - z).
inline Complex stieltjes(const EmpiricalSample& sample, UpperHalfPoint z) {
  Complex s{};
  for (double x : sample.values()) s += 1.0 / (x - z.value());
  return s / static_cast<double>(sample.size());
}

/// y^{(k)}(z) = k! int alpha(dw) / (w - z)^{k+1}.
inline Complex stieltjes_derivative(const GoverningMeasure& alpha, int k, UpperHalfPoint z,
                                    double quadrature_tol = 1e-10) {
  detail::require_1d(alpha, "stieltjes_derivative");
  if (k < 0) throw std::invalid_argument("stieltjes_derivative: order must be >= 0");
  const Complex zz = z.value();
  const double kf = numeric::factorial(k);
  if (const auto* f = alpha.as<family::Cauchy1D>())
    return kf / numeric::ipow(std::conj(detail::cauchy_parameter(*f)) - zz, k + 1);
  return kf * expect(alpha, [&](double w) { return 1.0 / numeric::ipow(w - zz, k + 1); }, quadrature_tol);
}

/// g(z) = -int log(w - z) alpha(dw), principal branch.
inline Complex log_transform(const GoverningMeasure& alpha, UpperHalfPoint z, double quadrature_tol = 1e-10) {
  detail::require_1d(alpha, "log_transform");
  const Complex zz = z.value();
  if (const auto* f = alpha.as<family::Cauchy1D>()) return -std::log(std::conj(detail::cauchy_parameter(*f)) - zz);
  return -expect(alpha, [&](double w) { return std::log(w - zz); }, quadrature_tol);
}

inline Complex log_transform(const EmpiricalSample& sample, UpperHalfPoint z) {
  Complex s{};
  for (double x : sample.values()) s += std::log(x - z.value());
  return -s / static_cast<double>(sample.size());
}

/// int log(1 - i s x) alpha(dx).
inline Complex log_fourier_transform(const GoverningMeasure& alpha, double s, double quadrature_tol = 1e-10) {
  detail::require_1d(alpha, "log_fourier_transform");
  const Complex is(0.0, s);
  if (const auto* f = alpha.as<family::Cauchy1D>()) {
    // x -> log(1 - i s x) is analytic in the half plane away from its zero x = -i/s
    const Complex w = detail::cauchy_parameter(*f);
    return std::log(1.0 - is * (s >= 0.0 ? w : std::conj(w)));
  }
  return expect(alpha, [&](double x) { return std::log(1.0 - is * x); }, quadrature_tol);
}

/// Both sides of the transform identity
///   E (1 - i s X)^{-t} = exp(-t int log(1 - i s x) alpha(dx))       (frequency form)
///   E (X - z)^{-t}     = exp(-t int log(x - z) alpha(dx))            (Stieltjes form)
/// with X ~ mu(t alpha). The left side is a Monte Carlo mean; `standard_error`
/// is sqrt(Var Re + Var Im) / sqrt(n) of that mean.
struct IdentityResidual {
  Complex lhs;
  Complex rhs;
  double residual;
  double standard_error;
  std::size_t n;
};

using TransformArgument = std::variant<double, UpperHalfPoint>;

inline IdentityResidual cr_identity_residual(const GoverningMeasure& alpha, double t, TransformArgument where,
                                             std::size_t mc_n, RngStream& rng,
                                             const TruncationPolicy& policy = TruncationPolicy::standard(),
                                             double quadrature_tol = 1e-10) {
  detail::require_1d(alpha, "cr_identity_residual");
  if (!(t > 0.0)) throw std::invalid_argument("cr_identity_residual: t must be > 0");
  if (mc_n < 2) throw std::invalid_argument("cr_identity_residual: mc_n must be >= 2");

  Complex log_rhs;
  std::function<Complex(double)> log_kernel;
  if (const double* s = std::get_if<double>(&where)) {
    const Complex is(0.0, *s);
    log_rhs = log_fourier_transform(alpha, *s, quadrature_tol);
    log_kernel = [is](double x) { return std::log(1.0 - is * x); };
  } else {
    const Complex z = std::get<UpperHalfPoint>(where).value();
    log_rhs = -log_transform(alpha, std::get<UpperHalfPoint>(where), quadrature_tol);
    log_kernel = [z](double x) { return std::log(x - z); };
  }

  const EmpiricalSample sample = sample_dirichlet_mean(alpha, t, mc_n, policy, rng);
  double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
  for (double x : sample.values()) {
    const Complex v = std::exp(-t * log_kernel(x));
    sum_re += v.real();
    sum_im += v.imag();
    sq_re += v.real() * v.real();
    sq_im += v.imag() * v.imag();
  }
  const double n = static_cast<double>(mc_n);
  const Complex lhs(sum_re / n, sum_im / n);
  const double var = (sq_re - n * lhs.real() * lhs.real() + sq_im - n * lhs.imag() * lhs.imag()) / (n - 1.0);
  const Complex rhs = std::exp(-t * log_rhs);
  return {lhs, rhs, std::abs(lhs - rhs), std::sqrt(std::max(var, 0.0) / n), mc_n};
}

/// n y y^{(n-1)} - y^{(n)}; identically zero exactly when alpha is Cauchy or a point mass.
inline Complex ode_residual(const GoverningMeasure& alpha, int n, UpperHalfPoint z, double quadrature_tol = 1e-10) {
  if (n < 1) throw std::invalid_argument("ode_residual: order must be >= 1");
  const Complex y = stieltjes_derivative(alpha, 0, z, quadrature_tol);
  const Complex lower = stieltjes_derivative(alpha, n - 1, z, quadrature_tol);
  const Complex upper = stieltjes_derivative(alpha, n, z, quadrature_tol);
  return static_cast<double>(n) * y * lower - upper;
}

/// (y^{(n-1)}/(n-1)!)^m - (y^{(m-1)}/(m-1)!)^n for n < m.
inline Complex power_identity_residual(const GoverningMeasure& alpha, int n, int m, UpperHalfPoint z,
                                       double quadrature_tol = 1e-10) {
  if (n < 1 || m <= n) throw std::invalid_argument("power_identity_residual: need 1 <= n < m");
  const Complex a = stieltjes_derivative(alpha, n - 1, z, quadrature_tol) / numeric::factorial(n - 1);
  const Complex b = stieltjes_derivative(alpha, m - 1, z, quadrature_tol) / numeric::factorial(m - 1);
  return numeric::ipow(a, m) - numeric::ipow(b, n);
}

/// CSV rows "re_z,im_z,abs_residual" of ode_residual over a grid of points.
inline void write_residual_sweep(std::ostream& out, const GoverningMeasure& alpha, int n,
                                 const std::vector<UpperHalfPoint>& grid, double quadrature_tol = 1e-10) {
  out << "# ode_residual order=" << n << " alpha=" << alpha.describe() << "\n";
  out << "re_z,im_z,abs_residual\n";
  for (const auto& z : grid) {
    out << numeric::format_double(z.value().real()) << ',' << numeric::format_double(z.value().imag()) << ','
        << numeric::format_double(std::abs(ode_residual(alpha, n, z, quadrature_tol))) << '\n';
  }
}

}  // namespace dcurve
