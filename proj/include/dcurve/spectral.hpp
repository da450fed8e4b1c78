#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"

namespace dcurve {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

/// One atom lambda * delta_s of a spectral measure on the unit sphere.
struct SpectralAtom {
  Point direction;
  double mass;
};

/// A Cauchy law on R^d given by a shift and a finite-atom spectral measure b
/// on the unit sphere: <f, X> is Cauchy with parameter
///   w(f) = <a,f> - (2/pi) sum_j l_j <f,s_j> log|<f,s_j>| + i sum_j l_j |<f,s_j>|.
///
/// Invariants: every direction is a unit vector (1e-12), the atoms are
/// centered, |sum_j l_j s_j| <= 1e-10 (strict 1-stability).
class SpectralCauchy {
 public:
  static constexpr double kUnitTolerance = 1e-12;
  static constexpr double kCenteringTolerance = 1e-10;

  SpectralCauchy(Point shift, std::vector<SpectralAtom> atoms)
      : shift_(std::move(shift)), atoms_(std::move(atoms)) {
    if (shift_.empty()) throw std::invalid_argument("SpectralCauchy: dimension must be positive");
    if (atoms_.empty()) throw std::invalid_argument("SpectralCauchy: at least one atom required");
    Point resultant(shift_.size(), 0.0);
    for (const auto& atom : atoms_) {
      if (atom.direction.size() != shift_.size())
        throw std::invalid_argument("SpectralCauchy: atom dimension mismatch");
      if (!(atom.mass > 0.0)) throw std::invalid_argument("SpectralCauchy: atom mass must be > 0");
      if (std::fabs(norm(atom.direction) - 1.0) > kUnitTolerance)
        throw std::invalid_argument("SpectralCauchy: atom direction is not a unit vector");
      for (std::size_t i = 0; i < resultant.size(); ++i) resultant[i] += atom.mass * atom.direction[i];
    }
    if (norm(resultant) > kCenteringTolerance)
      throw std::invalid_argument("SpectralCauchy: spectral measure is not centered (|sum l_j s_j| = " +
                                  std::to_string(norm(resultant)) + ")");
    drift_ = shift_;
    for (const auto& atom : atoms_) {
      const double c = 2.0 / std::numbers::pi * atom.mass * std::log(atom.mass);
      for (std::size_t i = 0; i < drift_.size(); ++i) drift_[i] += c * atom.direction[i];
    }
  }

  /// Standard symmetric Cauchy on R: atoms +1 and -1 with mass 1/2.
  static SpectralCauchy standard_1d() { return SpectralCauchy({0.0}, {{{1.0}, 0.5}, {{-1.0}, 0.5}}); }

  /// Three unit atoms at the cube roots of unity in R^2, zero shift. The
  /// median of <f,X> traces a trefoil as f turns.
  static SpectralCauchy trefoil() {
    std::vector<SpectralAtom> atoms;
    for (int k = 0; k < 3; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 3.0;
      atoms.push_back({{std::cos(a), std::sin(a)}, 1.0});
    }
    return SpectralCauchy({0.0, 0.0}, std::move(atoms));
  }

  /// C * (uniform on the sphere), discretized symmetrically, so that
  /// w(f) ~ i |f|. C = sqrt(pi) Gamma((d+1)/2) / Gamma(d/2).
  /// d = 1 is exact with two atoms; d = 2 uses `atoms` equally spaced angles.
  static SpectralCauchy uniform_discretized(std::size_t dimension, std::size_t atoms = 720) {
    if (dimension == 1) return standard_1d();
    if (dimension != 2)
      throw std::invalid_argument("SpectralCauchy::uniform_discretized: only d = 1, 2 supported");
    if (atoms < 2 || atoms % 2 != 0)
      throw std::invalid_argument("SpectralCauchy::uniform_discretized: need an even atom count");
    const double total = uniform_constant(2);
    std::vector<SpectralAtom> list;
    list.reserve(atoms);
    for (std::size_t k = 0; k < atoms; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(atoms);
      list.push_back({{std::cos(a), std::sin(a)}, total / static_cast<double>(atoms)});
    }
    return SpectralCauchy({0.0, 0.0}, std::move(list));
  }

  static double uniform_constant(std::size_t dimension) {
    const double d = static_cast<double>(dimension);
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (d + 1.0)) / std::tgamma(0.5 * d);
  }

  std::size_t dimension() const noexcept { return shift_.size(); }
  const Point& shift() const noexcept { return shift_; }
  const std::vector<SpectralAtom>& atoms() const noexcept { return atoms_; }

  /// The complex parameter of the Cauchy law of <f, X>; 0 log 0 := 0.
  Complex w_of(std::span<const double> f) const {
    if (f.size() != dimension()) throw std::invalid_argument("w_of: dimension mismatch");
    double re = dot(shift_, f);
    double im = 0.0;
    for (const auto& atom : atoms_) {
      const double c = dot(f, atom.direction);
      if (c != 0.0) re -= 2.0 / std::numbers::pi * atom.mass * c * std::log(std::fabs(c));
      im += atom.mass * std::fabs(c);
    }
    return {re, im};
  }

  /// One draw: X = a + (2/pi) sum_j l_j log(l_j) s_j + sum_j l_j s_j Z_j with Z_j
  /// standard totally skewed 1-stable. Scaling Z by l_j shifts it by
  /// -(2/pi) l_j log l_j in law; the drift term cancels that shift.
  void draw(RngStream& rng, std::span<double> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = drift_[i];
    for (const auto& atom : atoms_) {
      const double z = atom.mass * skewed_stable1_variate(rng);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += z * atom.direction[i];
    }
  }

 private:
  Point shift_;
  std::vector<SpectralAtom> atoms_;
  Point drift_;
};

}  // namespace dcurve
