#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace dcurve {

class GoverningMeasure;

/// A weighted point of a discrete governing measure.
struct Atom {
  Point x;
  double weight;
};

namespace family {

struct DiscreteAtoms {
  std::vector<Atom> atoms;
  std::vector<double> cumulative;  // running weight sums, last == 1
};
struct Beta {
  double a, b;
};
struct Uniform01 {};
struct BetaPrime {
  double a, b;
};
struct Cauchy1D {
  double location, scale;
};
struct UniformCircle {};
struct CauchyRd {
  SpectralCauchy spectral;
};
/// Law of R * D with R ~ radial (scalar, on [0, inf)) independent of D ~ direction.
struct ScaledProduct {
  std::shared_ptr<const GoverningMeasure> radial;
  std::shared_ptr<const GoverningMeasure> direction;
};

}  // namespace family

/// The probability alpha on R^d that drives a Dirichlet curve.
///
/// Every family here satisfies the log-moment condition
/// int log(1 + |x|) alpha(dx) < inf, so the Dirichlet mean exists for each.
/// Construct through the named factories; they validate parameters.
class GoverningMeasure {
 public:
  using Family = std::variant<family::DiscreteAtoms, family::Beta, family::Uniform01, family::BetaPrime,
                              family::Cauchy1D, family::UniformCircle, family::CauchyRd,
                              family::ScaledProduct>;

  /// Weights within 1e-12 of summing to one are renormalized; anything
  /// further off is rejected.
  static GoverningMeasure atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("atoms: at least one atom required");
    const std::size_t d = atoms.front().x.size();
    if (d == 0) throw std::invalid_argument("atoms: dimension must be positive");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (a.x.size() != d) throw std::invalid_argument("atoms: inconsistent dimensions");
      if (!(a.weight > 0.0)) throw std::invalid_argument("atoms: weights must be > 0");
      for (double v : a.x)
        if (!std::isfinite(v)) throw std::invalid_argument("atoms: non-finite coordinate");
      total += a.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("atoms: weights sum to " + numeric::format_double(total) + ", not 1");
    family::DiscreteAtoms f;
    double running = 0.0;
    for (auto& a : atoms) {
      a.weight /= total;
      running += a.weight;
      f.cumulative.push_back(running);
    }
    f.cumulative.back() = 1.0;
    f.atoms = std::move(atoms);
    return GoverningMeasure(std::move(f), d);
  }

  static GoverningMeasure point_mass(Point x) { return atoms({{std::move(x), 1.0}}); }

  /// q delta_0 + p delta_1 on R.
  static GoverningMeasure bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bernoulli: p must lie in (0,1)");
    return atoms({{{0.0}, 1.0 - p}, {{1.0}, p}});
  }

  static GoverningMeasure beta(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta: shapes must be > 0");
    return GoverningMeasure(family::Beta{a, b}, 1);
  }

  static GoverningMeasure uniform01() { return GoverningMeasure(family::Uniform01{}, 1); }

  /// Beta of the second kind on (0, inf): law of Z / (1 - Z), Z ~ beta(a, b).
  static GoverningMeasure beta_prime(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta_prime: shapes must be > 0");
    return GoverningMeasure(family::BetaPrime{a, b}, 1);
  }

  static GoverningMeasure cauchy(double location, double scale) {
    if (!(scale > 0.0) || !std::isfinite(location))
      throw std::invalid_argument("cauchy: need finite location and scale > 0");
    return GoverningMeasure(family::Cauchy1D{location, scale}, 1);
  }

  static GoverningMeasure uniform_circle() { return GoverningMeasure(family::UniformCircle{}, 2); }

  static GoverningMeasure cauchy_rd(SpectralCauchy spectral) {
    const std::size_t d = spectral.dimension();
    return GoverningMeasure(family::CauchyRd{std::move(spectral)}, d);
  }

  static GoverningMeasure scaled_product(const GoverningMeasure& radial, const GoverningMeasure& direction) {
    if (!radial.satisfies_ft() || !direction.satisfies_ft())
      throw std::invalid_argument("scaled_product: both factors must satisfy the log-moment condition");
    if (radial.dimension() != 1 || !radial.is_nonnegative())
      throw std::invalid_argument("scaled_product: radial factor must be a law on [0, inf)");
    return GoverningMeasure(family::ScaledProduct{std::make_shared<const GoverningMeasure>(radial),
                                                  std::make_shared<const GoverningMeasure>(direction)},
                            direction.dimension());
  }

  std::size_t dimension() const noexcept { return dimension_; }
  const Family& family() const noexcept { return family_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&family_);
  }

  /// True for every constructible family.
  bool satisfies_ft() const noexcept { return true; }

  /// Support contained in [0, inf) (one-dimensional families only).
  bool is_nonnegative() const {
    if (dimension_ != 1) return false;
    return std::visit(
        [](const auto& f) -> bool {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
            return std::all_of(f.atoms.begin(), f.atoms.end(), [](const Atom& a) { return a.x[0] >= 0.0; });
          } else if constexpr (std::is_same_v<T, family::Beta> || std::is_same_v<T, family::Uniform01> ||
                               std::is_same_v<T, family::BetaPrime>) {
            return true;
          } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
            return f.direction->is_nonnegative();
          } else {
            return false;
          }
        },
        family_);
  }

  /// No first moment. Truncated stick-breaking must absorb the tail for these.
  bool is_heavy_tailed() const {
    return std::visit(
        [](const auto& f) -> bool {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Cauchy1D> || std::is_same_v<T, family::CauchyRd>) {
            return true;
          } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
            return f.b <= 1.0;
          } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
            return f.radial->is_heavy_tailed() || f.direction->is_heavy_tailed();
          } else {
            return false;
          }
        },
        family_);
  }

  std::string describe() const {
    using numeric::format_double;
    return std::visit(
        [&](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
            std::string s = "atoms{";
            for (std::size_t i = 0; i < f.atoms.size(); ++i) {
              if (i) s += ";";
              s += "(";
              for (std::size_t j = 0; j < f.atoms[i].x.size(); ++j) {
                if (j) s += " ";
                s += format_double(f.atoms[i].x[j]);
              }
              s += "):" + format_double(f.atoms[i].weight);
            }
            return s + "}";
          } else if constexpr (std::is_same_v<T, family::Beta>) {
            return "beta(" + format_double(f.a) + " " + format_double(f.b) + ")";
          } else if constexpr (std::is_same_v<T, family::Uniform01>) {
            return "uniform01";
          } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
            return "betaprime(" + format_double(f.a) + " " + format_double(f.b) + ")";
          } else if constexpr (std::is_same_v<T, family::Cauchy1D>) {
            return "cauchy(" + format_double(f.location) + " " + format_double(f.scale) + ")";
          } else if constexpr (std::is_same_v<T, family::UniformCircle>) {
            return "circle";
          } else if constexpr (std::is_same_v<T, family::CauchyRd>) {
            return "cauchy_rd(d=" + std::to_string(f.spectral.dimension()) +
                   " atoms=" + std::to_string(f.spectral.atoms().size()) + ")";
          } else {
            return "product(" + f.radial->describe() + " x " + f.direction->describe() + ")";
          }
        },
        family_);
  }

  /// One draw from alpha into `out` (size dimension()).
  void draw(RngStream& rng, std::span<double> out) const {
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
            const Atom& a = pick(f, rng);
            std::copy(a.x.begin(), a.x.end(), out.begin());
          } else if constexpr (std::is_same_v<T, family::UniformCircle>) {
            const double theta = 2.0 * std::numbers::pi * dcurve::uniform01(rng);
            out[0] = std::cos(theta);
            out[1] = std::sin(theta);
          } else if constexpr (std::is_same_v<T, family::CauchyRd>) {
            f.spectral.draw(rng, out);
          } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
            const double r = f.radial->draw_scalar(rng);
            f.direction->draw(rng, out);
            for (double& v : out) v *= r;
          } else {
            out[0] = draw_scalar(rng);
          }
        },
        family_);
  }

  /// One draw of a one-dimensional alpha.
  double draw_scalar(RngStream& rng) const {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
            return pick(f, rng).x[0];
          } else if constexpr (std::is_same_v<T, family::Beta>) {
            return beta_variate(rng, f.a, f.b);
          } else if constexpr (std::is_same_v<T, family::Uniform01>) {
            return dcurve::uniform01(rng);
          } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
            const LogBetaDraw z = log_beta_variate(rng, f.a, f.b);
            return std::exp(z.log_z - z.log_1mz);
          } else if constexpr (std::is_same_v<T, family::Cauchy1D>) {
            return f.location + f.scale * std::tan(std::numbers::pi * (dcurve::uniform01(rng) - 0.5));
          } else if constexpr (std::is_same_v<T, family::CauchyRd>) {
            double x = 0.0;
            f.spectral.draw(rng, std::span<double>(&x, 1));
            return x;
          } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
            const double r = f.radial->draw_scalar(rng);
            return r * f.direction->draw_scalar(rng);
          } else {
            throw std::logic_error("draw_scalar on a multivariate family");
          }
        },
        family_);
  }

 private:
  GoverningMeasure(Family f, std::size_t d) : family_(std::move(f)), dimension_(d) {
    if (const auto* p = std::get_if<family::ScaledProduct>(&family_); p && p->direction->dimension() != d)
      throw std::invalid_argument("GoverningMeasure: dimension mismatch");
    if (std::holds_alternative<family::UniformCircle>(family_) && d != 2)
      throw std::invalid_argument("GoverningMeasure: circle lives in R^2");
  }

  static const Atom& pick(const family::DiscreteAtoms& f, RngStream& rng) {
    if (f.atoms.size() == 1) return f.atoms.front();
    const double u = dcurve::uniform01(rng);
    const auto it = std::upper_bound(f.cumulative.begin(), f.cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - f.cumulative.begin()),
                                           f.atoms.size() - 1);
    return f.atoms[idx];
  }

  Family family_;
  std::size_t dimension_;
};

// ---------------------------------------------------------------------------

/// Where a sample came from; carried into CSV headers.
struct Provenance {
  std::string measure;
  std::optional<double> t;
  std::string sampler;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string truncation;
};

/// n draws in R^d, stored row-major. Every row is finite and n >= 1.
class EmpiricalSample {
 public:
  EmpiricalSample(std::size_t dimension, std::vector<double> draws, Provenance provenance = {})
      : dimension_(dimension), draws_(std::move(draws)), provenance_(std::move(provenance)) {
    if (dimension_ == 0) throw std::invalid_argument("EmpiricalSample: dimension must be positive");
    if (draws_.empty() || draws_.size() % dimension_ != 0)
      throw std::invalid_argument("EmpiricalSample: need n >= 1 complete rows");
    for (double v : draws_)
      if (!std::isfinite(v)) throw std::invalid_argument("EmpiricalSample: non-finite draw");
  }

  std::size_t size() const noexcept { return draws_.size() / dimension_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  Provenance& provenance() noexcept { return provenance_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {draws_.data() + i * dimension_, dimension_};
  }
  std::span<const double> data() const noexcept { return draws_; }

  /// The draws of a one-dimensional sample.
  std::span<const double> values() const {
    if (dimension_ != 1) throw std::invalid_argument("EmpiricalSample::values: sample is not 1-d");
    return draws_;
  }

  /// <f, X_i> for every row.
  std::vector<double> project(std::span<const double> f) const {
    if (f.size() != dimension_) throw std::invalid_argument("EmpiricalSample::project: dimension mismatch");
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(row(i), f);
    return out;
  }

  /// |X_i|^2 for every row.
  std::vector<double> squared_norms() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(row(i), row(i));
    return out;
  }

 private:
  std::size_t dimension_;
  std::vector<double> draws_;
  Provenance provenance_;
};

/// n i.i.d. draws from alpha.
inline EmpiricalSample sample_measure(const GoverningMeasure& measure, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_measure: n must be >= 1");
  const std::size_t d = measure.dimension();
  std::vector<double> draws(n * d);
  for (std::size_t i = 0; i < n; ++i) measure.draw(rng, std::span<double>(draws.data() + i * d, d));
  return EmpiricalSample(d, std::move(draws),
                         {measure.describe(), std::nullopt, "direct", rng.seed(), rng.stream_id(), ""});
}

/// int x alpha(dx) when it exists.
inline std::optional<Point> mean_of(const GoverningMeasure& measure) {
  return std::visit(
      [&](const auto& f) -> std::optional<Point> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
          Point m(measure.dimension(), 0.0);
          for (const auto& a : f.atoms)
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += a.weight * a.x[i];
          return m;
        } else if constexpr (std::is_same_v<T, family::Beta>) {
          return Point{f.a / (f.a + f.b)};
        } else if constexpr (std::is_same_v<T, family::Uniform01>) {
          return Point{0.5};
        } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
          if (f.b <= 1.0) return std::nullopt;
          return Point{f.a / (f.b - 1.0)};
        } else if constexpr (std::is_same_v<T, family::UniformCircle>) {
          return Point{0.0, 0.0};
        } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
          const auto r = mean_of(*f.radial);
          const auto d = mean_of(*f.direction);
          if (!r || !d) return std::nullopt;
          Point m = *d;
          for (double& v : m) v *= (*r)[0];
          return m;
        } else {
          return std::nullopt;
        }
      },
      measure.family());
}

/// m_k = int x^k alpha(dx) for k = 1..n_max (one-dimensional alpha).
inline std::vector<double> raw_moments(const GoverningMeasure& measure, int n_max) {
  if (measure.dimension() != 1) throw std::invalid_argument("raw_moments: alpha must be one-dimensional");
  if (n_max < 1) throw std::invalid_argument("raw_moments: n_max must be >= 1");
  std::vector<double> m(static_cast<std::size_t>(n_max));
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
          for (int k = 1; k <= n_max; ++k) {
            double s = 0.0;
            for (const auto& a : f.atoms) s += a.weight * std::pow(a.x[0], k);
            m[k - 1] = s;
          }
        } else if constexpr (std::is_same_v<T, family::Beta> || std::is_same_v<T, family::Uniform01>) {
          double a = 1.0, b = 1.0;
          if constexpr (std::is_same_v<T, family::Beta>) a = f.a, b = f.b;
          double r = 1.0;
          for (int k = 1; k <= n_max; ++k) {
            r *= (a + k - 1) / (a + b + k - 1);
            m[k - 1] = r;
          }
        } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
          if (static_cast<double>(n_max) >= f.b)
            throw std::domain_error("raw_moments: beta-prime moment of order >= b does not exist");
          double r = 1.0;
          for (int k = 1; k <= n_max; ++k) {
            r *= (f.a + k - 1) / (f.b - k);
            m[k - 1] = r;
          }
        } else if constexpr (std::is_same_v<T, family::ScaledProduct>) {
          const auto mr = raw_moments(*f.radial, n_max);
          const auto md = raw_moments(*f.direction, n_max);
          for (int k = 0; k < n_max; ++k) m[k] = mr[k] * md[k];
        } else {
          throw std::domain_error("raw_moments: " + measure.describe() + " has no moments");
        }
      },
      measure.family());
  return m;
}

// ---------------------------------------------------------------------------
// Integrals against a one-dimensional alpha. Atoms are summed exactly; the
// absolutely continuous families are reduced to (0,1) and integrated by
// tanh-sinh.

namespace detail {

template <class H>
auto integrate_against(const GoverningMeasure& measure, H&& h, double tol) {
  using R = std::decay_t<decltype(h(0.0))>;
  if (measure.dimension() != 1) throw std::invalid_argument("integral against alpha: alpha must be 1-d");
  auto unit = [&](auto&& g) -> R {
    if constexpr (std::is_same_v<R, Complex>) {
      return numeric::integrate_unit_complex(g, tol, "integral against alpha");
    } else {
      return numeric::integrate_unit(g, tol, "integral against alpha");
    }
  };
  return std::visit(
      [&](const auto& f) -> R {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
          R s{};
          for (const auto& a : f.atoms) s += a.weight * h(a.x[0]);
          return s;
        } else if constexpr (std::is_same_v<T, family::Uniform01>) {
          return unit([&](double u, double) { return h(u); });
        } else if constexpr (std::is_same_v<T, family::Beta>) {
          const double lb = std::lgamma(f.a) + std::lgamma(f.b) - std::lgamma(f.a + f.b);
          return unit([&](double u, double v) -> R {
            const double dens = std::exp((f.a - 1.0) * std::log(u) + (f.b - 1.0) * std::log(v) - lb);
            return dens * h(u);
          });
        } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
          const double lb = std::lgamma(f.a) + std::lgamma(f.b) - std::lgamma(f.a + f.b);
          return unit([&](double u, double v) -> R {
            const double dens = std::exp((f.a - 1.0) * std::log(u) + (f.b - 1.0) * std::log(v) - lb);
            return dens * h(u / v);
          });
        } else if constexpr (std::is_same_v<T, family::Cauchy1D>) {
          // x = location + scale * tan(pi (u - 1/2)), u uniform
          return unit([&](double u, double v) -> R {
            const double tn = u < 0.5 ? -1.0 / std::tan(std::numbers::pi * u) : 1.0 / std::tan(std::numbers::pi * v);
            return h(f.location + f.scale * tn);
          });
        } else {
          throw std::domain_error("integral against alpha: unsupported family " + measure.describe());
        }
      },
      measure.family());
}

}  // namespace detail

/// int h(x) alpha(dx) for a one-dimensional alpha; h real or complex valued.
template <class H>
auto expect(const GoverningMeasure& measure, H&& h, double tol = 1e-10) {
  return detail::integrate_against(measure, std::forward<H>(h), tol);
}

/// alpha((x, inf)) for a one-dimensional alpha.
inline double upper_tail(const GoverningMeasure& measure, double x) {
  if (measure.dimension() != 1) throw std::invalid_argument("upper_tail: alpha must be 1-d");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::DiscreteAtoms>) {
          double s = 0.0;
          for (const auto& a : f.atoms)
            if (a.x[0] > x) s += a.weight;
          return s;
        } else if constexpr (std::is_same_v<T, family::Uniform01>) {
          return std::clamp(1.0 - x, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, family::Beta>) {
          return numeric::beta_sf(f.a, f.b, x);
        } else if constexpr (std::is_same_v<T, family::BetaPrime>) {
          return x <= 0.0 ? 1.0 : numeric::beta_sf(f.a, f.b, x / (1.0 + x));
        } else if constexpr (std::is_same_v<T, family::Cauchy1D>) {
          return 0.5 - std::atan((x - f.location) / f.scale) / std::numbers::pi;
        } else {
          throw std::domain_error("upper_tail: unsupported family " + measure.describe());
        }
      },
      measure.family());
}

}  // namespace dcurve
