#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "stickbreak.hpp"

namespace dcurve {

/// Default significance level for KS verdicts.
inline constexpr double kKsLevel = 0.001;

/// P(K > lambda) for the Kolmogorov limit law K = sup |Brownian bridge|.
/// Alternating series for lambda >= 1.18, the Jacobi-theta form below it.
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    const double y = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * y);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

struct KSReport {
  double statistic;
  std::size_t n;
  std::optional<std::size_t> m;
  double p_value;
  double level;
  bool pass;  // p_value > level
};

inline KSReport make_ks_report(double d, std::size_t n, std::optional<std::size_t> m, double level) {
  const double n_eff = m ? static_cast<double>(n) * static_cast<double>(*m) / static_cast<double>(n + *m)
                         : static_cast<double>(n);
  const double p = kolmogorov_survival(d * std::sqrt(n_eff));
  return {d, n, m, p, level, p > level};
}

/// One-sample KS of `values` against a continuous CDF. Asymptotic p-value,
/// reliable for n >= 35.
template <class Cdf>
KSReport ks_one_sample(std::span<const double> values, Cdf&& cdf, double level = kKsLevel) {
  const std::size_t n = values.size();
  if (n < 10) throw std::invalid_argument("ks_one_sample: need n >= 10");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(x[i]);
    if (!std::isfinite(f)) throw std::invalid_argument("ks_one_sample: CDF returned a non-finite value");
    d = std::max({d, f - static_cast<double>(i) / nn, static_cast<double>(i + 1) / nn - f});
  }
  return make_ks_report(d, n, std::nullopt, level);
}

template <class Cdf>
KSReport ks_one_sample(const EmpiricalSample& sample, Cdf&& cdf, double level = kKsLevel) {
  return ks_one_sample(sample.values(), std::forward<Cdf>(cdf), level);
}

/// Two-sample KS; tied values advance both empirical CDFs together.
inline KSReport ks_two_sample(std::span<const double> xs, std::span<const double> ys, double level = kKsLevel) {
  if (xs.size() < 10 || ys.size() < 10) throw std::invalid_argument("ks_two_sample: need n, m >= 10");
  std::vector<double> x(xs.begin(), xs.end()), y(ys.begin(), ys.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return make_ks_report(d, x.size(), y.size(), level);
}

inline KSReport ks_two_sample(const EmpiricalSample& x, const EmpiricalSample& y, double level = kKsLevel) {
  return ks_two_sample(x.values(), y.values(), level);
}

// ---------------------------------------------------------------------------
// Convex order through hinge functions (x - a)_+.

struct HingeCurve {
  Point direction;
  std::vector<double> thresholds;
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::vector<double> half_width;  // two-sided normal interval at `confidence`
  double confidence;
  std::size_t n;
};

/// Monte Carlo E[(<f, X> - a)_+] on a strictly increasing grid.
inline HingeCurve hinge_curve(const EmpiricalSample& sample, const Point& f, const std::vector<double>& grid,
                              double confidence = 0.95) {
  if (grid.empty()) throw std::invalid_argument("hinge_curve: empty threshold grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("hinge_curve: thresholds must increase strictly");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("hinge_curve: confidence in (0,1)");
  const std::vector<double> proj = sample.project(f);
  const double n = static_cast<double>(proj.size());
  const double z = numeric::two_sided_z(confidence);
  HingeCurve out{f, grid, {}, {}, {}, confidence, proj.size()};
  for (double a : grid) {
    double s = 0.0, sq = 0.0;
    for (double p : proj) {
      const double h = p > a ? p - a : 0.0;
      s += h;
      sq += h * h;
    }
    const double mean = s / n;
    const double var = proj.size() > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
    const double se = std::sqrt(var / n);
    out.estimate.push_back(mean);
    out.standard_error.push_back(se);
    out.half_width.push_back(z * se);
  }
  return out;
}

/// One (s, t, a) comparison: gap = E_t - E_s, flagged when gap > slack.
struct OrderRow {
  double s, t, a;
  double gap;
  double slack;
  bool violated;
};

/// Two-sided check that adjacent samples share a mean.
struct MeanRow {
  double s, t;
  double difference;
  double slack;
  bool violated;
};

struct OrderReport {
  std::vector<std::pair<double, double>> pairs;
  std::vector<OrderRow> rows;
  std::vector<MeanRow> means;
  bool consistent;
  std::optional<OrderRow> worst;  // largest gap - slack among violations
  std::vector<HingeCurve> curves;
};

/// For consecutive intensities s < t, tests E_t[(<f,X> - a)_+] <= E_s[...]
/// one-sided at every threshold, with Bonferroni over all pairs and
/// thresholds, and tests equal means two-sided with Bonferroni over pairs.
/// Index 0 may carry alpha itself under t = 0.
inline OrderReport convex_order_check(const std::vector<std::pair<double, EmpiricalSample>>& samples, const Point& f,
                                      const std::vector<double>& grid, double confidence = 0.999) {
  if (samples.size() < 2) throw std::invalid_argument("convex_order_check: need at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i - 1].first < samples[i].first))
      throw std::invalid_argument("convex_order_check: intensities must increase");
    if (samples[i].second.dimension() != samples[0].second.dimension())
      throw std::invalid_argument("convex_order_check: dimension mismatch");
  }
  OrderReport report{{}, {}, {}, true, std::nullopt, {}};
  for (const auto& [t, sample] : samples) report.curves.push_back(hinge_curve(sample, f, grid, confidence));

  const double pairs = static_cast<double>(samples.size() - 1);
  const double level = 1.0 - confidence;
  const double z_one_sided = numeric::normal_quantile(1.0 - level / (pairs * static_cast<double>(grid.size())));
  const double z_means = numeric::normal_quantile(1.0 - level / (2.0 * pairs));
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double s = samples[i - 1].first, t = samples[i].first;
    report.pairs.emplace_back(s, t);
    const HingeCurve& lo = report.curves[i - 1];
    const HingeCurve& hi = report.curves[i];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double gap = hi.estimate[k] - lo.estimate[k];
      const double slack = z_one_sided * std::hypot(hi.standard_error[k], lo.standard_error[k]);
      const OrderRow row{s, t, grid[k], gap, slack, gap > slack};
      report.rows.push_back(row);
      if (row.violated) {
        report.consistent = false;
        if (!report.worst || gap - slack > report.worst->gap - report.worst->slack) report.worst = row;
      }
    }
    // means of <f, X>
    auto moments = [&](const EmpiricalSample& x) {
      const std::vector<double> p = x.project(f);
      double sum = 0.0, sq = 0.0;
      for (double v : p) sum += v, sq += v * v;
      const double n = static_cast<double>(p.size());
      const double mean = sum / n;
      const double var = p.size() > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
      return std::pair{mean, var / n};
    };
    const auto [m0, v0] = moments(samples[i - 1].second);
    const auto [m1, v1] = moments(samples[i].second);
    const double slack = z_means * std::sqrt(v0 + v1);
    const MeanRow mean_row{s, t, m1 - m0, slack, std::fabs(m1 - m0) > slack};
    report.means.push_back(mean_row);
    if (mean_row.violated) report.consistent = false;
  }
  return report;
}

inline void write_hinge_csv(std::ostream& out, const std::vector<double>& intensities, const OrderReport& report) {
  out << "t,a,estimate,ci_low,ci_high\n";
  for (std::size_t i = 0; i < report.curves.size(); ++i) {
    const HingeCurve& c = report.curves[i];
    for (std::size_t k = 0; k < c.thresholds.size(); ++k) {
      out << numeric::format_double(intensities[i]) << ',' << numeric::format_double(c.thresholds[k]) << ','
          << numeric::format_double(c.estimate[k]) << ',' << numeric::format_double(c.estimate[k] - c.half_width[k])
          << ',' << numeric::format_double(c.estimate[k] + c.half_width[k]) << '\n';
    }
  }
}

inline void write_order_csv(std::ostream& out, const OrderReport& report) {
  out << "s,t,a,gap,slack,verdict\n";
  for (const auto& r : report.rows) {
    out << numeric::format_double(r.s) << ',' << numeric::format_double(r.t) << ',' << numeric::format_double(r.a)
        << ',' << numeric::format_double(r.gap) << ',' << numeric::format_double(r.slack) << ','
        << (r.violated ? "violated" : "consistent") << '\n';
  }
}

// ---------------------------------------------------------------------------

/// Two-sample z-test on the second moments of two samples.
struct MomentZTest {
  double lhs, rhs;
  double z;
  double p_value;  // two-sided
};

inline MomentZTest second_moment_ztest(std::span<const double> x, std::span<const double> y) {
  auto stats = [](std::span<const double> v) {
    double s = 0.0, sq = 0.0;
    for (double e : v) {
      const double e2 = e * e;
      s += e2;
      sq += e2 * e2;
    }
    const double n = static_cast<double>(v.size());
    const double mean = s / n;
    return std::pair{mean, std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) / n};
  };
  const auto [mx, vx] = stats(x);
  const auto [my, vy] = stats(y);
  const double z = (mx - my) / std::sqrt(vx + vy);
  return {mx, my, z, std::erfc(std::fabs(z) / std::numbers::sqrt2)};
}

struct BetaIdentityReport {
  double a, b;
  double u_first_shape;  // U ~ beta(u_first_shape, b - a)
  KSReport ks;
  MomentZTest second_moment;
};

/// Draws (1 - U) X_b + U X_a with X_b ~ beta(b,b), X_a ~ beta(a,a),
/// U ~ beta(u_first_shape, b - a) and compares with fresh X_b draws.
/// u_first_shape = 2a is the identity; other values serve as controls.
inline BetaIdentityReport beta_identity_check(double a, double b, std::size_t n, RngStream& rng,
                                              std::optional<double> u_first_shape = std::nullopt,
                                              double level = kKsLevel) {
  if (!(a > 0.0) || !(a < b)) throw std::invalid_argument("beta_identity_check: need 0 < a < b");
  const double u_shape = u_first_shape.value_or(2.0 * a);
  RngStream mix_rng = rng.substream(0), fresh_rng = rng.substream(1);
  std::vector<double> mixed(n), fresh(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xb = beta_variate(mix_rng, b, b);
    const double xa = beta_variate(mix_rng, a, a);
    const LogBetaDraw u = log_beta_variate(mix_rng, u_shape, b - a);
    mixed[i] = u.complement() * xb + u.value() * xa;
    fresh[i] = beta_variate(fresh_rng, b, b);
  }
  return {a, b, u_shape, ks_two_sample(mixed, fresh, level), second_moment_ztest(mixed, fresh)};
}

// ---------------------------------------------------------------------------

/// Monte Carlo check of E|X|^s <= E|B|^s (s >= 1), or for 0 < s < 1 of
/// E|X|^s <= t B(t,s) E|B|^s and E|B|^s <= E(int |x| P_t(dx))^s.
struct MomentInequalityReport {
  double t, s;
  double ex, ex_se;  // E|X_t|^s
  double eb, eb_se;  // E|B|^s
  double bound_factor;  // 1 for s >= 1, t B(t,s) otherwise
  double upper_gap, upper_slack;  // ex - factor * eb, one-sided slack
  std::optional<double> e_norm_mean, e_norm_mean_se;  // E(int |x| P_t(dx))^s, s < 1 only
  std::optional<double> lower_gap, lower_slack;        // eb - e_norm_mean
  bool holds;
};

inline MomentInequalityReport moment_inequality_check(const GoverningMeasure& measure, double t, double s,
                                                      std::size_t n, RngStream& rng, double confidence = 0.999) {
  if (!(s > 0.0)) throw std::invalid_argument("moment_inequality_check: s must be > 0");
  if (n < 2) throw std::invalid_argument("moment_inequality_check: n must be >= 2");
  auto abs_moment = [&](const EmpiricalSample& x) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = std::pow(norm(x.row(i)), s);
      sum += v;
      sq += v * v;
    }
    const double nn = static_cast<double>(x.size());
    const double mean = sum / nn;
    return std::pair{mean, std::sqrt(std::max(0.0, (sq - nn * mean * mean) / (nn - 1.0)) / nn)};
  };
  RngStream rx = rng.substream(0), rb = rng.substream(1), rp = rng.substream(2);
  const auto [ex, ex_se] = abs_moment(sample_dirichlet_mean(measure, t, n, rx));
  const auto [eb, eb_se] = abs_moment(sample_measure(measure, n, rb));
  const double z = numeric::normal_quantile(confidence);
  const double factor = s >= 1.0 ? 1.0 : t * numeric::beta_function(t, s);

  MomentInequalityReport r{t, s, ex, ex_se, eb, eb_se, factor, ex - factor * eb,
                           z * std::hypot(ex_se, factor * eb_se), std::nullopt, std::nullopt, std::nullopt,
                           std::nullopt, false};
  r.holds = r.upper_gap <= r.upper_slack;
  if (s < 1.0) {
    const auto [en, en_se] = abs_moment(sample_mean_of_norm(measure, t, n, TruncationPolicy::standard(), rp));
    r.e_norm_mean = en;
    r.e_norm_mean_se = en_se;
    r.lower_gap = eb - en;
    r.lower_slack = z * std::hypot(eb_se, en_se);
    r.holds = r.holds && *r.lower_gap <= *r.lower_slack;
  }
  return r;
}

/// Sample mean and its standard error for a one-dimensional sample.
struct MeanEstimate {
  double mean, standard_error, variance;
};

inline MeanEstimate mean_estimate(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("mean_estimate: need at least two values");
  double sum = 0.0;
  for (double e : v) sum += e;
  const double n = static_cast<double>(v.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double e : v) sq += (e - mean) * (e - mean);
  const double var = sq / (n - 1.0);
  return {mean, std::sqrt(var / n), var};
}

/// Sample variance with its standard error sqrt((m4 - s^4 (n-3)/(n-1)) / n).
struct VarianceEstimate {
  double variance, standard_error;
};

inline VarianceEstimate variance_estimate(std::span<const double> v) {
  const MeanEstimate m = mean_estimate(v);
  double m4 = 0.0;
  for (double e : v) {
    const double d2 = (e - m.mean) * (e - m.mean);
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(v.size());
  m4 /= n;
  const double s2 = m.variance;
  return {s2, std::sqrt(std::max(0.0, m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n)};
}

}  // namespace dcurve
