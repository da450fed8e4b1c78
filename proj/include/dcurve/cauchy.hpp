#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "stickbreak.hpp"

namespace dcurve {

/// n i.i.d. draws of the Cauchy law on R^d defined by `spec`.
inline EmpiricalSample sample_cauchy_rd(const SpectralCauchy& spec, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_cauchy_rd: n must be >= 1");
  const std::size_t d = spec.dimension();
  std::vector<double> draws(n * d);
  for (std::size_t i = 0; i < n; ++i) spec.draw(rng, std::span<double>(draws.data() + i * d, d));
  return EmpiricalSample(d, std::move(draws),
                         {"cauchy_rd(atoms=" + std::to_string(spec.atoms().size()) + ")", std::nullopt,
                          "spectral_cms", rng.seed(), rng.stream_id(), ""});
}

/// CDF of c_w, w = a + ib: 1/2 + arctan((x - a)/b) / pi.
inline double cauchy_cdf(Complex w, double x) { return 0.5 + std::atan((x - w.real()) / w.imag()) / std::numbers::pi; }

/// r(theta) = g(theta) + g(theta - 2pi/3) + g(theta + 2pi/3), with
/// g(theta) = -(2/pi) cos(theta) log|cos(theta)|: the median of <f, X> for the
/// three-atom trefoil spectrum and f = (cos theta, sin theta).
inline double trefoil_median(double theta) {
  auto g = [](double angle) {
    const double c = std::cos(angle);
    return c == 0.0 ? 0.0 : -2.0 / std::numbers::pi * c * std::log(std::fabs(c));
  };
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  return g(theta) + g(theta - third) + g(theta + third);
}

/// CSV rows "theta,r,x,y" of the trefoil curve r(theta) e^{i theta}.
inline void write_trefoil_csv(std::ostream& out, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("write_trefoil_csv: need at least one step");
  out << "theta,r,x,y\n";
  for (std::size_t k = 0; k < steps; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(steps);
    const double r = trefoil_median(theta);
    out << numeric::format_double(theta) << ',' << numeric::format_double(r) << ','
        << numeric::format_double(r * std::cos(theta)) << ',' << numeric::format_double(r * std::sin(theta)) << '\n';
  }
}

/// KS of stick-breaking draws from mu(t alpha) against the standard Cauchy
/// CDF. With alpha standard Cauchy this checks invariance of the curve;
/// other alpha give negative controls.
inline KSReport verify_cauchy_fixed(const GoverningMeasure& alpha, double t, std::size_t n, RngStream& rng,
                                    double level = kKsLevel) {
  const EmpiricalSample x = sample_dirichlet_mean(alpha, t, n, rng);
  return ks_one_sample(x, [](double v) { return cauchy_cdf({0.0, 1.0}, v); }, level);
}

/// mu(t c) = c for the standard Cauchy c.
inline KSReport verify_yamato(double t, std::size_t n, RngStream& rng, double level = kKsLevel) {
  return verify_cauchy_fixed(GoverningMeasure::cauchy(0.0, 1.0), t, n, rng, level);
}

/// Two-sample KS between mu(t (c o radial)) by stick-breaking and C X with
/// C standard Cauchy independent of X ~ mu(t radial).
inline KSReport verify_mult_invariance(const GoverningMeasure& radial, double t, std::size_t n, RngStream& rng,
                                       double level = kKsLevel) {
  const GoverningMeasure c = GoverningMeasure::cauchy(0.0, 1.0);
  RngStream left_rng = rng.substream(0), right_rng = rng.substream(1);
  const EmpiricalSample left = sample_dirichlet_mean(GoverningMeasure::scaled_product(radial, c), t, n, left_rng);
  const EmpiricalSample x = sample_dirichlet_mean(radial, t, n, right_rng);
  std::vector<double> right(n);
  for (std::size_t i = 0; i < n; ++i) right[i] = c.draw_scalar(right_rng) * x.values()[i];
  return ks_two_sample(left.values(), right, level);
}

/// Empirical characteristic function of <f, X> at r against e^{i r w(f)}.
struct CharacteristicCheck {
  double r;
  Complex empirical;
  Complex expected;
  double residual;
  double standard_error;  // sqrt(Var cos + Var sin) / sqrt(n)
  bool pass;              // residual <= 3 standard errors
};

inline std::vector<CharacteristicCheck> characteristic_function_check(const SpectralCauchy& spec,
                                                                      const EmpiricalSample& sample,
                                                                      std::span<const double> f,
                                                                      const std::vector<double>& frequencies) {
  const std::vector<double> proj = sample.project(f);
  const Complex w = spec.w_of(f);
  const double n = static_cast<double>(proj.size());
  std::vector<CharacteristicCheck> out;
  for (double r : frequencies) {
    if (!(r > 0.0)) throw std::invalid_argument("characteristic_function_check: frequencies must be > 0");
    double sc = 0.0, ss = 0.0, qc = 0.0, qs = 0.0;
    for (double p : proj) {
      const double c = std::cos(r * p), s = std::sin(r * p);
      sc += c, ss += s, qc += c * c, qs += s * s;
    }
    const Complex emp(sc / n, ss / n);
    const double var = (qc - n * emp.real() * emp.real() + qs - n * emp.imag() * emp.imag()) / (n - 1.0);
    const Complex expected = std::exp(Complex(0.0, r) * w);
    const double se = std::sqrt(std::max(var, 0.0) / n);
    const double residual = std::abs(emp - expected);
    out.push_back({r, emp, expected, residual, se, residual <= 3.0 * se});
  }
  return out;
}

/// Sample median of a one-dimensional projection.
inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median_of: empty input");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace dcurve
