#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace dcurve {

namespace law {

struct Beta {
  double a, b;
};
/// Beta of the second kind: x^{a-1} (1+x)^{-a-b} / B(a,b) on (0, inf).
struct BetaPrime {
  double a, b;
};
struct Dirichlet {
  std::vector<double> shapes;
};
/// X = R Theta in R^2 with R^2 ~ beta(1, t) and Theta uniform on the circle.
struct RadialCircle {
  double t;
};
struct PointMass {
  Point x;
};
/// c_w with w = a + ib: density b / (pi ((x-a)^2 + b^2)).
struct Cauchy1D {
  Complex w;
};

/// A density on a bounded interval, with a CDF table built once at
/// construction. Immutable afterwards, so safe to share between threads.
class Density {
 public:
  static constexpr std::size_t kPanels = 64;
  static constexpr double kNormalizationTolerance = 1e-8;

  Density(std::string name, std::function<double(double)> pdf, double lo, double hi)
      : name_(std::move(name)), pdf_(std::move(pdf)), lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("Density: support must be a bounded interval");
    edges_.resize(kPanels + 1);
    cumulative_.assign(kPanels + 1, 0.0);
    for (std::size_t i = 0; i <= kPanels; ++i)
      edges_[i] = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(kPanels);
    for (std::size_t i = 0; i < kPanels; ++i)
      cumulative_[i + 1] = cumulative_[i] + panel(edges_[i], edges_[i + 1]);
    if (std::fabs(cumulative_.back() - 1.0) > kNormalizationTolerance)
      throw std::invalid_argument("Density " + name_ + ": integrates to " +
                                  numeric::format_double(cumulative_.back()) + ", not 1");
  }

  const std::string& name() const noexcept { return name_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double total_mass() const noexcept { return cumulative_.back(); }
  double pdf(double x) const { return x <= lo_ || x >= hi_ ? 0.0 : pdf_(x); }

  double cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const auto i = static_cast<std::size_t>(it - edges_.begin()) - 1;
    const double value = cumulative_[i] + panel(edges_[i], x);
    return std::clamp(value, 0.0, 1.0);
  }

  /// int x^k f(x) dx.
  double moment(int k) const {
    return numeric::integrate_interval([&](double x) { return std::pow(x, k) * pdf(x); }, lo_, hi_, 1e-13,
                                       "Density::moment");
  }

 private:
  double panel(double a, double b) const {
    return numeric::integrate_interval([&](double x) { return pdf_(x); }, a, b, 1e-13, "Density::cdf");
  }

  std::string name_;
  std::function<double(double)> pdf_;
  double lo_, hi_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;
};

}  // namespace law

/// A closed-form law on the Dirichlet curve.
using ExactLaw = std::variant<law::Beta, law::BetaPrime, law::Dirichlet, law::RadialCircle,
                              std::shared_ptr<const law::Density>, law::PointMass, law::Cauchy1D>;

/// (e/pi) sin(pi x) x^{-x} (1-x)^{-(1-x)} on (0,1): the law of the mean of a
/// Dirichlet process with uniform base measure and unit intensity.
inline double diaconis_kemperman_pdf(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double y = 1.0 - x;
  return std::numbers::e / std::numbers::pi * std::sin(std::numbers::pi * x) *
         std::exp(-x * std::log(x) - y * std::log1p(-x));
}

inline std::shared_ptr<const law::Density> diaconis_kemperman_law() {
  static const auto shared =
      std::make_shared<const law::Density>("diaconis_kemperman", diaconis_kemperman_pdf, 0.0, 1.0);
  return shared;
}

inline std::string describe(const ExactLaw& l) {
  using numeric::format_double;
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, law::Beta>) {
          return "beta(" + format_double(f.a) + " " + format_double(f.b) + ")";
        } else if constexpr (std::is_same_v<T, law::BetaPrime>) {
          return "betaprime(" + format_double(f.a) + " " + format_double(f.b) + ")";
        } else if constexpr (std::is_same_v<T, law::Dirichlet>) {
          std::string s = "dirichlet(";
          for (std::size_t i = 0; i < f.shapes.size(); ++i) s += (i ? " " : "") + format_double(f.shapes[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<T, law::RadialCircle>) {
          return "radial_circle(" + format_double(f.t) + ")";
        } else if constexpr (std::is_same_v<T, law::PointMass>) {
          std::string s = "point(";
          for (std::size_t i = 0; i < f.x.size(); ++i) s += (i ? " " : "") + format_double(f.x[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<T, law::Cauchy1D>) {
          return "cauchy(" + format_double(f.w.real()) + " " + format_double(f.w.imag()) + ")";
        } else {
          return "density(" + f->name() + ")";
        }
      },
      l);
}

/// mu(t alpha) in closed form when one is known.
inline std::optional<ExactLaw> curve_of(const GoverningMeasure& measure, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("curve_of: t must be > 0");
  if (const auto* f = measure.as<family::DiscreteAtoms>()) {
    if (f->atoms.size() == 1) return law::PointMass{f->atoms.front().x};
    if (measure.dimension() == 1 && f->atoms.size() == 2) {
      double p0 = -1.0, p1 = -1.0;
      for (const auto& a : f->atoms) {
        if (a.x[0] == 0.0) p0 = a.weight;
        if (a.x[0] == 1.0) p1 = a.weight;
      }
      if (p0 > 0.0 && p1 > 0.0) return law::Beta{t * p1, t * p0};
    }
    // atoms exactly at the canonical basis e_1..e_d
    if (f->atoms.size() == measure.dimension() && measure.dimension() > 1) {
      std::vector<double> shapes(measure.dimension(), 0.0);
      for (const auto& a : f->atoms) {
        std::size_t ones = 0, index = 0;
        for (std::size_t i = 0; i < a.x.size(); ++i) {
          if (a.x[i] == 1.0) ++ones, index = i;
          else if (a.x[i] != 0.0) return std::nullopt;
        }
        if (ones != 1 || shapes[index] != 0.0) return std::nullopt;
        shapes[index] = t * a.weight;
      }
      return law::Dirichlet{std::move(shapes)};
    }
    return std::nullopt;
  }
  if (const auto* f = measure.as<family::Beta>()) {
    if (f->a == 0.5 && f->b == 0.5) return law::Beta{t + 0.5, t + 0.5};
    if (f->a == 1.0 && f->b == 1.0 && t == 1.0) return diaconis_kemperman_law();
    return std::nullopt;
  }
  if (measure.as<family::Uniform01>()) {
    if (t == 1.0) return diaconis_kemperman_law();
    return std::nullopt;
  }
  if (const auto* f = measure.as<family::BetaPrime>()) {
    if (f->a == 0.5 && f->b == 0.5) return law::BetaPrime{t + 0.5, 0.5};
    return std::nullopt;
  }
  if (const auto* f = measure.as<family::Cauchy1D>()) return law::Cauchy1D{{f->location, f->scale}};
  if (measure.as<family::UniformCircle>()) return law::RadialCircle{t};
  return std::nullopt;
}

/// CDF of a one-dimensional law. For RadialCircle the argument is u and the
/// value is P(|X|^2 <= u).
inline double cdf(const ExactLaw& l, double x) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, law::Beta>) {
          return numeric::beta_cdf(f.a, f.b, x);
        } else if constexpr (std::is_same_v<T, law::BetaPrime>) {
          return x <= 0.0 ? 0.0 : numeric::beta_cdf(f.a, f.b, x / (1.0 + x));
        } else if constexpr (std::is_same_v<T, law::RadialCircle>) {
          if (x <= 0.0) return 0.0;
          if (x >= 1.0) return 1.0;
          return -std::expm1(f.t * std::log1p(-x));
        } else if constexpr (std::is_same_v<T, law::PointMass>) {
          if (f.x.size() != 1) throw std::invalid_argument("cdf: point mass is not one-dimensional");
          return x >= f.x[0] ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, law::Cauchy1D>) {
          return 0.5 + std::atan((x - f.w.real()) / f.w.imag()) / std::numbers::pi;
        } else if constexpr (std::is_same_v<T, law::Dirichlet>) {
          throw std::invalid_argument("cdf: Dirichlet law is multivariate");
        } else {
          return f->cdf(x);
        }
      },
      l);
}

/// Density of a one-dimensional law (of |X|^2 for RadialCircle).
inline double density(const ExactLaw& l, double x) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, law::Beta>) {
          return numeric::beta_pdf(f.a, f.b, x);
        } else if constexpr (std::is_same_v<T, law::BetaPrime>) {
          if (x <= 0.0) return 0.0;
          return std::exp((f.a - 1.0) * std::log(x) - (f.a + f.b) * std::log1p(x)) /
                 numeric::beta_function(f.a, f.b);
        } else if constexpr (std::is_same_v<T, law::RadialCircle>) {
          return x <= 0.0 || x >= 1.0 ? 0.0 : f.t * std::pow(1.0 - x, f.t - 1.0);
        } else if constexpr (std::is_same_v<T, law::Cauchy1D>) {
          const double u = (x - f.w.real()) / f.w.imag();
          return 1.0 / (std::numbers::pi * f.w.imag() * (1.0 + u * u));
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const law::Density>>) {
          return f->pdf(x);
        } else {
          throw std::invalid_argument("density: law has no one-dimensional density");
        }
      },
      l);
}

/// E X^k of a one-dimensional law.
inline double law_moment(const ExactLaw& l, int k) {
  if (k < 0) throw std::invalid_argument("law_moment: k must be >= 0");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, law::Beta>) {
          double r = 1.0;
          for (int j = 0; j < k; ++j) r *= (f.a + j) / (f.a + f.b + j);
          return r;
        } else if constexpr (std::is_same_v<T, law::BetaPrime>) {
          if (k >= f.b) throw std::domain_error("law_moment: beta-prime moment does not exist");
          double r = 1.0;
          for (int j = 1; j <= k; ++j) r *= (f.a + j - 1) / (f.b - j);
          return r;
        } else if constexpr (std::is_same_v<T, law::PointMass>) {
          if (f.x.size() != 1) throw std::invalid_argument("law_moment: point mass is not one-dimensional");
          return std::pow(f.x[0], k);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const law::Density>>) {
          return f->moment(k);
        } else {
          throw std::domain_error("law_moment: unsupported law");
        }
      },
      l);
}

/// n draws from a closed-form law. Density laws are not samplable.
inline EmpiricalSample sample_law(const ExactLaw& l, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_law: n must be >= 1");
  std::size_t d = 1;
  std::vector<double> draws;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, law::Beta>) {
          for (std::size_t i = 0; i < n; ++i) draws.push_back(beta_variate(rng, f.a, f.b));
        } else if constexpr (std::is_same_v<T, law::BetaPrime>) {
          for (std::size_t i = 0; i < n; ++i) {
            const LogBetaDraw z = log_beta_variate(rng, f.a, f.b);
            draws.push_back(std::exp(z.log_z - z.log_1mz));
          }
        } else if constexpr (std::is_same_v<T, law::Dirichlet>) {
          d = f.shapes.size();
          std::vector<double> lg(d);
          for (std::size_t i = 0; i < n; ++i) {
            double total = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < d; ++j) total = log_sum_exp(total, lg[j] = log_gamma_variate(rng, f.shapes[j]));
            for (std::size_t j = 0; j < d; ++j) draws.push_back(std::exp(lg[j] - total));
          }
        } else if constexpr (std::is_same_v<T, law::RadialCircle>) {
          d = 2;
          for (std::size_t i = 0; i < n; ++i) {
            const double r = std::sqrt(-std::expm1(std::log(uniform01(rng)) / f.t));
            const double theta = 2.0 * std::numbers::pi * uniform01(rng);
            draws.push_back(r * std::cos(theta));
            draws.push_back(r * std::sin(theta));
          }
        } else if constexpr (std::is_same_v<T, law::PointMass>) {
          d = f.x.size();
          for (std::size_t i = 0; i < n; ++i) draws.insert(draws.end(), f.x.begin(), f.x.end());
        } else if constexpr (std::is_same_v<T, law::Cauchy1D>) {
          for (std::size_t i = 0; i < n; ++i)
            draws.push_back(f.w.real() + f.w.imag() * std::tan(std::numbers::pi * (uniform01(rng) - 0.5)));
        } else {
          throw std::invalid_argument("sample_law: density laws are not samplable");
        }
      },
      l);
  return EmpiricalSample(d, std::move(draws), {describe(l), std::nullopt, "exact", rng.seed(), rng.stream_id(), ""});
}

// ---------------------------------------------------------------------------
// Moments along the curve.

/// E X_t^k for k = 1..n from the raw moments of alpha, and the polynomial
/// values P_{k-1}(t) = (t+1)_{k-1} E X_t^k / k!.
struct MomentTable {
  double t;
  std::vector<double> m;   // m[k-1] = m_k
  std::vector<double> ex;  // ex[k-1] = E X_t^k
  std::vector<double> p;   // p[k] = P_k(t)
};

/// E X^k = (k-1)!/(t+1)_{k-1} sum_{j<k} (t)_j E X^j / j! m_{k-j}.
inline MomentTable moment_recursion(const std::vector<double>& m, double t) {
  if (m.empty()) throw std::invalid_argument("moment_recursion: need at least m_1");
  if (!(t > 0.0)) throw std::invalid_argument("moment_recursion: t must be > 0");
  const int n = static_cast<int>(m.size());
  MomentTable table{t, m, std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> c(n + 1);  // c[j] = E X^j / j!
  c[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += numeric::rising(t, j) * c[j] * m[k - j - 1];
    const double ek = numeric::factorial(k - 1) / numeric::rising(t + 1.0, k - 1) * s;
    table.ex[k - 1] = ek;
    c[k] = ek / numeric::factorial(k);
    table.p[k - 1] = numeric::rising(t + 1.0, k - 1) * c[k];
  }
  return table;
}

/// Coefficients in t (constant first).
using Polynomial = std::vector<double>;

inline double evaluate(const Polynomial& p, double t) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * t + *it;
  return r;
}

namespace detail {

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  Polynomial r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Polynomial poly_derivative(const Polynomial& a) {
  if (a.size() <= 1) return {0.0};
  Polynomial r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = static_cast<double>(i) * a[i];
  return r;
}

inline Polynomial poly_sub(Polynomial a, const Polynomial& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

}  // namespace detail

/// P_0..P_3 and Q_1..Q_3 for a probability on [0, inf).
///
/// P_n = m_{n+1}/(n+1) + t/(n+1) sum_{k<n} P_k m_{n-k}, and
/// Q_k = P_k d/dt (t+1)_k - (t+1)_k P_k', built by polynomial arithmetic.
struct PQPolynomials {
  std::array<Polynomial, 4> p;  // p[k] = P_k
  std::array<Polynomial, 4> q;  // q[k] = Q_k for k = 1..3; q[0] unused
  std::array<double, 4> p_at_t;
  std::array<double, 4> q_at_t;
};

inline PQPolynomials p_q_polynomials(const std::array<double, 4>& m, double t) {
  const double m1 = m[0], m2 = m[1], m3 = m[2], m4 = m[3];
  // Stieltjes moment conditions for a law on [0, inf), with round-off slack
  const double scale = std::max({1.0, m1 * m1, m2, m4});
  const double slack = 1e-12 * scale * scale;
  const double h3 = m2 * m4 + 2.0 * m1 * m2 * m3 - m2 * m2 * m2 - m1 * m1 * m4 - m3 * m3;
  if (!(m1 >= 0.0) || m2 - m1 * m1 < -1e-12 * scale || m1 * m3 - m2 * m2 < -slack || h3 < -slack)
    throw std::domain_error("p_q_polynomials: moments are not those of a probability on [0, inf)");

  PQPolynomials out;
  out.p[0] = {m1};
  for (int n = 1; n <= 3; ++n) {
    Polynomial sum{0.0};
    for (int k = 0; k < n; ++k) {
      Polynomial term = out.p[k];
      for (double& c : term) c *= m[n - k - 1];
      if (sum.size() < term.size()) sum.resize(term.size(), 0.0);
      for (std::size_t i = 0; i < term.size(); ++i) sum[i] += term[i];
    }
    Polynomial pn(sum.size() + 1, 0.0);
    pn[0] = m[n] / (n + 1);
    for (std::size_t i = 0; i < sum.size(); ++i) pn[i + 1] = sum[i] / (n + 1);
    out.p[n] = std::move(pn);
  }
  Polynomial rise{1.0};
  for (int k = 1; k <= 3; ++k) {
    rise = detail::poly_mul(rise, {static_cast<double>(k), 1.0});  // (t+1)_k
    out.q[k] = detail::poly_sub(detail::poly_mul(out.p[k], detail::poly_derivative(rise)),
                                detail::poly_mul(rise, detail::poly_derivative(out.p[k])));
    while (out.q[k].size() > 1 && out.q[k].back() == 0.0) out.q[k].pop_back();
    for (double c : out.q[k])
      if (c < -1e-12 * scale * scale)
        throw std::logic_error("p_q_polynomials: negative Q coefficient for valid moments");
  }
  for (int k = 0; k < 4; ++k) out.p_at_t[k] = evaluate(out.p[k], t);
  out.q_at_t[0] = 0.0;
  for (int k = 1; k < 4; ++k) out.q_at_t[k] = evaluate(out.q[k], t);
  return out;
}

// ---------------------------------------------------------------------------

/// Density of mu(alpha) (unit intensity) at x:
///   f(x) = (1/pi) sin(pi alpha((x, inf))) exp(g(x)),  g(x) = -int log|x - w| alpha(dw).
/// The log integral is split at w = x and each half is mapped to (0,1) so
/// that the distance to the singular endpoint is computed without
/// cancellation.
inline double cr_density(const GoverningMeasure& alpha, double x, double quadrature_tol = 1e-10) {
  if (alpha.dimension() != 1) throw std::invalid_argument("cr_density: alpha must be one-dimensional");
  const double tail = upper_tail(alpha, x);
  double g = 0.0;
  if (const auto* f = alpha.as<family::DiscreteAtoms>()) {
    for (const auto& a : f->atoms) {
      if (a.x[0] == x) throw QuadratureError("cr_density: x sits on an atom of alpha");
      g -= a.weight * std::log(std::fabs(x - a.x[0]));
    }
  } else if (const auto* f = alpha.as<family::Cauchy1D>()) {
    g = -std::log(std::abs(Complex(x - f->location, -f->scale)));
  } else {
    // density of alpha in log form, and its support
    double a = 1.0, b = 1.0;
    bool prime = false;
    if (const auto* f = alpha.as<family::Beta>()) a = f->a, b = f->b;
    else if (const auto* f = alpha.as<family::BetaPrime>()) a = f->a, b = f->b, prime = true;
    else if (!alpha.as<family::Uniform01>())
      throw std::invalid_argument("cr_density: unsupported family " + alpha.describe());
    const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    if (!prime) {
      if (!(x > 0.0 && x < 1.0)) throw std::domain_error("cr_density: x outside (0,1)");
      // w = x u on (0, x): x - w = x v, 1 - w = 1 - x u
      const double left = numeric::integrate_unit(
          [&](double u, double v) {
            const double w = x * u;
            const double dens = std::exp((a - 1.0) * std::log(w) + (b - 1.0) * std::log1p(-w) - log_b);
            return x * dens * std::log(x * v);
          },
          quadrature_tol, "cr_density");
      // w = x + (1-x) u on (x, 1): w - x = (1-x) u, 1 - w = (1-x) v
      const double y = 1.0 - x;
      const double right = numeric::integrate_unit(
          [&](double u, double v) {
            const double w = x + y * u;
            const double dens = std::exp((a - 1.0) * std::log(w) + (b - 1.0) * std::log(y * v) - log_b);
            return y * dens * std::log(y * u);
          },
          quadrature_tol, "cr_density");
      g = -(left + right);
    } else {
      if (!(x > 0.0)) throw std::domain_error("cr_density: x outside (0, inf)");
      auto dens = [&](double w) { return std::exp((a - 1.0) * std::log(w) - (a + b) * std::log1p(w) - log_b); };
      const double left = numeric::integrate_unit(
          [&](double u, double v) { return x * dens(x * u) * std::log(x * v); }, quadrature_tol, "cr_density");
      // w = x / v on (x, inf): w - x = x u / v, dw = x / v^2 du
      const double right = numeric::integrate_unit(
          [&](double u, double v) {
            const double lv = std::log(v), lx = std::log(x);
            const double log_jacobian_density =
                lx - 2.0 * lv + (a - 1.0) * (lx - lv) - (a + b) * (std::log(x + v) - lv) - log_b;
            return std::exp(log_jacobian_density) * (lx + std::log(u) - lv);
          },
          quadrature_tol, "cr_density");
      g = -(left + right);
    }
  }
  return std::sin(std::numbers::pi * tail) * std::exp(g) / std::numbers::pi;
}

}  // namespace dcurve
