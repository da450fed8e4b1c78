#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cauchy.hpp"
#include "config.hpp"
#include "exact.hpp"
#include "measures.hpp"
#include "stats.hpp"
#include "stickbreak.hpp"
#include "transforms.hpp"

namespace dcurve {

/// One pass/fail line of an experiment.
struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct ExperimentInfo {
  std::string name;
  std::string claim;
  std::vector<double> default_t_grid;
  std::function<std::vector<Check>(const ExperimentConfig&, std::ostream& csv)> run;
};

namespace experiments {

using numeric::format_double;

inline std::string fmt(double v) { return format_double(v); }

inline GoverningMeasure measure_or(const ExperimentConfig& c, const std::string& fallback_kind) {
  if (c.keys.has("measure")) return config::measure_from(c.keys);
  KeyValues kv;
  kv.add("measure", fallback_kind);
  return config::measure_from(kv);
}

inline std::vector<UpperHalfPoint> points(const ExperimentConfig& c, const std::string& key,
                                          const std::vector<UpperHalfPoint>& fallback) {
  const auto v = c.keys.get(key);
  if (!v) return fallback;
  std::vector<UpperHalfPoint> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto [re, im] = config::parse_complex(item, key);
    if (!(im > 0.0)) throw ConfigError(key + ": points need Im z > 0");
    out.emplace_back(re, im);
  }
  if (out.empty()) throw ConfigError(key + ": empty point list");
  return out;
}

inline std::string ks_detail(const KSReport& r) {
  return "D=" + fmt(r.statistic) + " p=" + fmt(r.p_value);
}

inline void csv_header(std::ostream& csv, const ExperimentConfig& c, const std::string& extra) {
  csv << "# experiment=" << c.experiment << " seed=" << c.seed << " n=" << c.n << " confidence="
      << fmt(c.confidence) << " truncation=" << c.policy.describe();
  if (!extra.empty()) csv << ' ' << extra;
  csv << '\n';
}

// ---------------------------------------------------------------------------

inline std::vector<Check> curve_ks(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "bernoulli");
  const RngStream base(c.seed, 0);
  std::vector<Check> checks;
  csv_header(csv, c, "measure=" + alpha.describe());
  csv << "t,law,n,D,p_value,pass\n";
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    const double t = c.t_grid[i];
    const auto law = curve_of(alpha, t);
    if (!law) throw ConfigError("curve-ks: no closed form for " + alpha.describe() + " at t=" + fmt(t));
    RngStream rng = base.substream(i);
    const EmpiricalSample x = sample_dirichlet_mean(alpha, t, c.n, c.policy, rng);
    KSReport r;
    if (std::holds_alternative<law::RadialCircle>(*law)) {
      r = ks_one_sample(x.squared_norms(), [&](double u) { return cdf(*law, u); });
    } else if (x.dimension() == 1) {
      r = ks_one_sample(x, [&](double v) { return cdf(*law, v); });
    } else {
      throw ConfigError("curve-ks: multivariate law " + describe(*law) + " has no one-dimensional CDF");
    }
    csv << fmt(t) << ',' << describe(*law) << ',' << c.n << ',' << fmt(r.statistic) << ',' << fmt(r.p_value) << ','
        << (r.pass ? 1 : 0) << '\n';
    checks.push_back({"t=" + fmt(t) + " vs " + describe(*law), r.pass, ks_detail(r)});
  }
  return checks;
}

inline std::vector<double> default_thresholds(const EmpiricalSample& sample, const Point& f) {
  std::vector<double> p = sample.project(f);
  std::sort(p.begin(), p.end());
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) {
    const double q = p[static_cast<std::size_t>(k * static_cast<double>(p.size() - 1) / 10.0)];
    if (grid.empty() || q > grid.back()) grid.push_back(q);
  }
  return grid;
}

inline std::vector<Check> convex_order(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "bernoulli");
  if (!mean_of(alpha)) throw ConfigError("convex-order: alpha needs a mean");
  std::vector<double> ts = c.t_grid;
  std::sort(ts.begin(), ts.end());
  const RngStream base(c.seed, 0);
  Point f = c.keys.has("direction") ? config::parse_list(*c.keys.get("direction"), "direction")
                                    : Point(alpha.dimension(), 0.0);
  if (!c.keys.has("direction")) f[0] = 1.0;
  if (f.size() != alpha.dimension()) throw ConfigError("convex-order: direction has the wrong dimension");

  std::vector<std::pair<double, EmpiricalSample>> samples;
  RngStream alpha_rng = base.substream(0);
  samples.emplace_back(0.0, sample_measure(alpha, c.n, alpha_rng));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    RngStream rng = base.substream(i + 1);
    samples.emplace_back(ts[i], sample_dirichlet_mean(alpha, ts[i], c.n, c.policy, rng));
  }
  const std::vector<double> grid = c.keys.has("thresholds")
                                       ? config::parse_list(*c.keys.get("thresholds"), "thresholds")
                                       : default_thresholds(samples[1].second, f);
  const OrderReport report = convex_order_check(samples, f, grid, c.confidence);

  csv_header(csv, c, "measure=" + alpha.describe() + " note=t=0_is_alpha");
  write_order_csv(csv, report);

  std::vector<Check> checks;
  std::string detail = "pairs=" + std::to_string(report.pairs.size()) + " thresholds=" + std::to_string(grid.size());
  if (report.worst) detail += " worst_gap=" + fmt(report.worst->gap) + " at a=" + fmt(report.worst->a);
  checks.push_back({"hinge means non-increasing in t, alpha first", report.consistent, detail});

  if (ts.size() >= 2) {
    std::vector<std::pair<double, EmpiricalSample>> swapped;
    swapped.emplace_back(ts[0], samples[2].second);
    swapped.emplace_back(ts[1], samples[1].second);
    const OrderReport control = convex_order_check(swapped, f, grid, c.confidence);
    checks.push_back({"reversed labels t=" + fmt(ts[0]) + "," + fmt(ts[1]) + " flagged", !control.consistent,
                      control.worst ? "gap=" + fmt(control.worst->gap) + " slack=" + fmt(control.worst->slack)
                                    : "no violation found"});
  }
  return checks;
}

inline std::vector<Check> moments(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "uniform01");
  const int k_max = static_cast<int>(config::number(c.keys, "k_max", 6));
  if (k_max < 2) throw ConfigError("moments: k_max must be >= 2");
  const std::vector<double> m = raw_moments(alpha, k_max);
  const RngStream base(c.seed, 0);
  std::vector<Check> checks;
  csv_header(csv, c, "measure=" + alpha.describe());
  csv << "t,k,recursion,closed_form,abs_diff\n";
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    const double t = c.t_grid[i];
    const MomentTable table = moment_recursion(m, t);
    const bool identities = std::fabs(table.ex[0] - m[0]) <= 1e-12 * std::max(1.0, std::fabs(m[0])) &&
                            std::fabs((t + 1.0) * table.ex[1] - (m[1] + t * m[0] * m[0])) <=
                                1e-12 * std::max(1.0, std::fabs(m[1] + t * m[0] * m[0]));
    checks.push_back({"t=" + fmt(t) + " E X = m1 and (t+1) E X^2 = m2 + t m1^2", identities, ""});

    const auto law = curve_of(alpha, t);
    if (law && !std::holds_alternative<law::RadialCircle>(*law) && !std::holds_alternative<law::Dirichlet>(*law)) {
      const bool quadrature = std::holds_alternative<std::shared_ptr<const law::Density>>(*law);
      const double tol = quadrature ? 1e-6 : 1e-12;
      double worst = 0.0;
      for (int k = 1; k <= k_max; ++k) {
        const double exact = law_moment(*law, k);
        const double diff = std::fabs(exact - table.ex[k - 1]);
        worst = std::max(worst, diff / std::max(1.0, std::fabs(exact)));
        csv << fmt(t) << ',' << k << ',' << fmt(table.ex[k - 1]) << ',' << fmt(exact) << ',' << fmt(diff) << '\n';
      }
      checks.push_back({"t=" + fmt(t) + " recursion vs moments of " + describe(*law), worst <= tol,
                        "max_rel_diff=" + fmt(worst) + " tol=" + fmt(tol)});
    } else {
      for (int k = 1; k <= k_max; ++k) csv << fmt(t) << ',' << k << ',' << fmt(table.ex[k - 1]) << ",,\n";
    }

    RngStream rng = base.substream(i);
    const EmpiricalSample x = sample_dirichlet_mean(alpha, t, c.n, c.policy, rng);
    const MeanEstimate mean = mean_estimate(x.values());
    const VarianceEstimate var = variance_estimate(x.values());
    const double want_var = (m[1] - m[0] * m[0]) / (t + 1.0);
    checks.push_back({"t=" + fmt(t) + " sample mean within 3 s.e. of m1",
                      std::fabs(mean.mean - m[0]) <= 3.0 * mean.standard_error,
                      "mean=" + fmt(mean.mean) + " m1=" + fmt(m[0]) + " se=" + fmt(mean.standard_error)});
    checks.push_back({"t=" + fmt(t) + " sample variance within 3 s.e. of var(alpha)/(t+1)",
                      std::fabs(var.variance - want_var) <= 3.0 * var.standard_error,
                      "var=" + fmt(var.variance) + " expected=" + fmt(want_var) + " se=" + fmt(var.standard_error)});

    if (k_max >= 4 && alpha.is_nonnegative()) {
      bool ok = true;
      std::string detail;
      try {
        const PQPolynomials pq = p_q_polynomials({m[0], m[1], m[2], m[3]}, t);
        detail = "Q1..Q3(t)=" + fmt(pq.q_at_t[1]) + "," + fmt(pq.q_at_t[2]) + "," + fmt(pq.q_at_t[3]);
      } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
      }
      checks.push_back({"t=" + fmt(t) + " Q_k coefficients non-negative", ok, detail});
    }
  }
  return checks;
}

inline std::vector<Check> cr_identity(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "bernoulli");
  const std::vector<double> freqs = config::list(c.keys, "s", {-2.0, -0.5, 0.5, 1.0, 3.0});
  const std::vector<UpperHalfPoint> zs =
      points(c, "z", {UpperHalfPoint(0.0, 1.0), UpperHalfPoint(1.0, 1.0), UpperHalfPoint(-0.5, 2.0)});
  const RngStream base(c.seed, 0);
  std::vector<Check> checks;
  csv_header(csv, c, "measure=" + alpha.describe());
  csv << "t,form,arg_re,arg_im,lhs_re,lhs_im,rhs_re,rhs_im,residual,se,pass\n";
  std::uint64_t stream = 0;
  for (double t : c.t_grid) {
    std::vector<std::pair<TransformArgument, std::pair<double, double>>> args;
    for (double s : freqs) args.push_back({s, {s, 0.0}});
    for (const auto& z : zs) args.push_back({z, {z.value().real(), z.value().imag()}});
    for (const auto& [arg, shown] : args) {
      RngStream rng = base.substream(stream++);
      const IdentityResidual r = cr_identity_residual(alpha, t, arg, c.n, rng, c.policy);
      const bool pass = r.residual <= 3.0 * r.standard_error;
      const bool frequency = std::holds_alternative<double>(arg);
      csv << fmt(t) << ',' << (frequency ? "fourier" : "stieltjes") << ',' << fmt(shown.first) << ','
          << fmt(shown.second) << ',' << fmt(r.lhs.real()) << ',' << fmt(r.lhs.imag()) << ',' << fmt(r.rhs.real())
          << ',' << fmt(r.rhs.imag()) << ',' << fmt(r.residual) << ',' << fmt(r.standard_error) << ','
          << (pass ? 1 : 0) << '\n';
      const std::string where = frequency ? "s=" + fmt(shown.first) : "z=" + fmt(shown.first) + "+" + fmt(shown.second) + "i";
      checks.push_back({"t=" + fmt(t) + " " + where + " residual <= 3 s.e.", pass,
                        "residual=" + fmt(r.residual) + " se=" + fmt(r.standard_error)});
    }
  }
  return checks;
}

inline std::vector<Check> ode_residual_experiment(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "cauchy");
  const bool cauchy_like = alpha.as<family::Cauchy1D>() ||
                           (alpha.as<family::DiscreteAtoms>() && alpha.as<family::DiscreteAtoms>()->atoms.size() == 1);
  const std::string expect = c.keys.get("expect").value_or(cauchy_like ? "zero" : "nonzero");
  if (expect != "zero" && expect != "nonzero") throw ConfigError("expect must be zero or nonzero");
  std::vector<UpperHalfPoint> zs;
  if (c.keys.has("z")) {
    zs = points(c, "z", {});
  } else if (expect == "zero") {
    RngStream rng = RngStream(c.seed, 0).substream(0);
    for (int i = 0; i < 5; ++i) {
      const double re = -2.0 + 4.0 * uniform01(rng);
      const double im = 0.2 + 1.8 * uniform01(rng);
      zs.emplace_back(re, im);
    }
  } else {
    zs = {UpperHalfPoint(0.0, 1.0), UpperHalfPoint(0.0, 2.0)};
  }
  const int n_max = static_cast<int>(config::number(c.keys, "order_max", 5));
  const int pair_n_max = static_cast<int>(config::number(c.keys, "pair_n_max", 3));
  const double zero_tol = config::number(c.keys, "zero_tol", 1e-10);
  const double nonzero_floor = config::number(c.keys, "nonzero_floor", 0.01);

  csv_header(csv, c, "measure=" + alpha.describe() + " expect=" + expect);
  csv << "kind,n,m,re_z,im_z,abs_residual\n";
  std::vector<Check> checks;
  // zero: every residual below zero_tol; nonzero: the largest residual at each z above nonzero_floor
  double worst_zero = 0.0, least_max = std::numeric_limits<double>::infinity();
  for (const auto& z : zs) {
    double largest = 0.0;
    auto row = [&](const char* kind, int n, int m, double r) {
      largest = std::max(largest, r);
      worst_zero = std::max(worst_zero, r);
      csv << kind << ',' << n << ',' << (m ? std::to_string(m) : std::string()) << ',' << fmt(z.value().real()) << ','
          << fmt(z.value().imag()) << ',' << fmt(r) << '\n';
    };
    for (int n = 1; n <= n_max; ++n) row("ode", n, 0, std::abs(ode_residual(alpha, n, z)));
    for (int n = 1; n <= pair_n_max; ++n)
      for (int m = n + 1; m <= n_max; ++m) row("power", n, m, std::abs(power_identity_residual(alpha, n, m, z)));
    least_max = std::min(least_max, largest);
    if (expect == "nonzero")
      checks.push_back({"largest residual at z=" + fmt(z.value().real()) + "+" + fmt(z.value().imag()) + "i above " +
                            fmt(nonzero_floor),
                        largest > nonzero_floor, "max=" + fmt(largest)});
  }
  if (expect == "zero")
    checks.push_back({"residuals vanish for " + alpha.describe(), worst_zero <= zero_tol,
                      "max=" + fmt(worst_zero) + " tol=" + fmt(zero_tol)});
  return checks;
}

inline std::vector<Check> cauchy_invariance(const ExperimentConfig& c, std::ostream& csv) {
  const RngStream base(c.seed, 0);
  std::vector<GoverningMeasure> radials;
  if (c.keys.nested("radial").has("measure")) {
    radials.push_back(config::measure_from(c.keys.nested("radial")));
  } else {
    radials.push_back(GoverningMeasure::atoms({{{1.0}, 0.5}, {{2.0}, 0.5}}));
    radials.push_back(GoverningMeasure::uniform01());
  }
  const std::vector<double> radial_t = config::list(c.keys, "radial_t", {1.0, 2.0});
  csv_header(csv, c, "");
  csv << "check,law,t,D,p_value,expected,pass\n";
  std::vector<Check> checks;
  std::uint64_t stream = 0;
  auto emit = [&](const std::string& name, const std::string& law, double t, const KSReport& r, bool want_pass) {
    const bool ok = r.pass == want_pass;
    csv << name << ',' << law << ',' << fmt(t) << ',' << fmt(r.statistic) << ',' << fmt(r.p_value) << ','
        << (want_pass ? "accept" : "reject") << ',' << (ok ? 1 : 0) << '\n';
    checks.push_back({name + " " + law + " t=" + fmt(t) + (want_pass ? " accepted" : " rejected"), ok, ks_detail(r)});
  };
  for (double t : c.t_grid) {
    RngStream rng = base.substream(stream++);
    emit("fixed_point_of_curve", "cauchy(0 1)", t, verify_yamato(t, c.n, rng), true);
  }
  for (std::size_t i = 0; i < radials.size(); ++i) {
    const double t = radial_t[std::min(i, radial_t.size() - 1)];
    RngStream rng = base.substream(stream++);
    emit("multiplicative", radials[i].describe(), t, verify_mult_invariance(radials[i], t, c.n, rng), true);
  }
  RngStream rng = base.substream(stream++);
  emit("negative_control", "uniform01", 1.0, verify_cauchy_fixed(GoverningMeasure::uniform01(), 1.0, c.n, rng), false);
  return checks;
}

inline std::vector<Check> trefoil(const ExperimentConfig& c, std::ostream& csv) {
  const auto steps = static_cast<std::size_t>(config::number(c.keys, "steps", 360));
  const auto median_n = static_cast<std::size_t>(config::number(c.keys, "median_n", 1e6));
  const double median_tol = config::number(c.keys, "median_tol", 0.02);
  csv_header(csv, c, "steps=" + std::to_string(steps));
  write_trefoil_csv(csv, steps);

  std::vector<Check> checks;
  const double r0 = trefoil_median(0.0);
  const double want = -2.0 / std::numbers::pi * std::numbers::ln2;
  checks.push_back({"r(0) = -(2/pi) ln 2", std::fabs(r0 - want) <= 1e-12, "r(0)=" + fmt(r0)});

  const SpectralCauchy spec = SpectralCauchy::trefoil();
  RngStream rng = RngStream(c.seed, 0).substream(0);
  const EmpiricalSample x = sample_cauchy_rd(spec, median_n, rng);
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double theta = std::numbers::pi * k / 4.0;
    const Point f{std::cos(theta), std::sin(theta)};
    worst = std::max(worst, std::fabs(median_of(x.project(f)) - trefoil_median(theta)));
  }
  checks.push_back({"empirical medians on 8 angles within " + fmt(median_tol), worst <= median_tol,
                    "max_abs_diff=" + fmt(worst) + " n=" + std::to_string(median_n)});

  const std::vector<double> freqs{0.5, 1.0, 2.0};
  const std::vector<std::pair<std::string, SpectralCauchy>> spectra{{"trefoil", spec},
                                                                    {"uniform720", SpectralCauchy::uniform_discretized(2)}};
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    RngStream srng = RngStream(c.seed, 0).substream(1 + s);
    const EmpiricalSample y = sample_cauchy_rd(spectra[s].second, c.n, srng);
    bool ok = true;
    double worst_ratio = 0.0;
    for (int d = 0; d < 5; ++d) {
      const double theta = 2.0 * std::numbers::pi * uniform01(srng);
      const Point f{std::cos(theta), std::sin(theta)};
      for (const auto& r : characteristic_function_check(spectra[s].second, y, f, freqs)) {
        ok = ok && r.pass;
        worst_ratio = std::max(worst_ratio, r.residual / r.standard_error);
      }
    }
    checks.push_back({spectra[s].first + " characteristic function within 3 s.e.", ok,
                      "max_residual_over_se=" + fmt(worst_ratio)});
  }
  return checks;
}

inline std::vector<Check> beta_identity(const ExperimentConfig& c, std::ostream& csv) {
  const std::vector<double> as = config::list(c.keys, "a", {0.5, 1.0});
  const std::vector<double> bs = config::list(c.keys, "b", {1.5, 2.0});
  if (as.size() != bs.size() || as.empty()) throw ConfigError("beta-identity: a and b lists must match");
  const RngStream base(c.seed, 0);
  csv_header(csv, c, "");
  csv << "a,b,u_shape,D,ks_p,z_second_moment,z_p,expected,pass\n";
  std::vector<Check> checks;
  for (std::size_t i = 0; i < as.size(); ++i) {
    RngStream rng = base.substream(2 * i);
    const BetaIdentityReport r = beta_identity_check(as[i], bs[i], c.n, rng);
    csv << fmt(r.a) << ',' << fmt(r.b) << ',' << fmt(r.u_first_shape) << ',' << fmt(r.ks.statistic) << ','
        << fmt(r.ks.p_value) << ',' << fmt(r.second_moment.z) << ',' << fmt(r.second_moment.p_value) << ",identity,"
        << (r.ks.pass ? 1 : 0) << '\n';
    checks.push_back({"a=" + fmt(as[i]) + " b=" + fmt(bs[i]) + " identity accepted", r.ks.pass, ks_detail(r.ks)});

    RngStream control_rng = base.substream(2 * i + 1);
    const double control_shape = config::number(c.keys, "control_shape_factor", 4.0) * as[i];
    const BetaIdentityReport bad = beta_identity_check(as[i], bs[i], c.n, control_rng, control_shape);
    const bool flagged = bad.second_moment.p_value < kKsLevel;
    csv << fmt(bad.a) << ',' << fmt(bad.b) << ',' << fmt(bad.u_first_shape) << ',' << fmt(bad.ks.statistic) << ','
        << fmt(bad.ks.p_value) << ',' << fmt(bad.second_moment.z) << ',' << fmt(bad.second_moment.p_value)
        << ",control," << (flagged ? 1 : 0) << '\n';
    checks.push_back({"a=" + fmt(as[i]) + " b=" + fmt(bs[i]) + " wrong mixing law flagged by second moment", flagged,
                      "z=" + fmt(bad.second_moment.z) + " p=" + fmt(bad.second_moment.p_value)});
  }
  return checks;
}

inline std::vector<Check> limits(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "uniform01");
  if (alpha.dimension() != 1) throw ConfigError("limits: alpha must be one-dimensional");
  const double t_small = config::number(c.keys, "t_small", 0.01);
  const double t_large = config::number(c.keys, "t_large", 1000.0);
  const auto n_large = static_cast<std::size_t>(config::number(c.keys, "n_large", 10000));
  const RngStream base(c.seed, 0);
  csv_header(csv, c, "measure=" + alpha.describe());
  csv << "check,t,statistic,threshold,pass\n";
  std::vector<Check> checks;

  RngStream small_rng = base.substream(0);
  const EmpiricalSample xs = sample_dirichlet_mean(alpha, t_small, c.n, c.policy, small_rng);
  const KSReport ks = ks_one_sample(xs, [&](double x) { return 1.0 - upper_tail(alpha, x); });
  csv << "ks_vs_alpha," << fmt(t_small) << ',' << fmt(ks.p_value) << ',' << fmt(ks.level) << ',' << (ks.pass ? 1 : 0)
      << '\n';
  checks.push_back({"t=" + fmt(t_small) + " sample passes KS against alpha", ks.pass, ks_detail(ks)});

  const std::vector<double> m = raw_moments(alpha, 2);
  const double var_alpha = m[1] - m[0] * m[0];
  RngStream large_rng = base.substream(1);
  const EmpiricalSample xl = sample_dirichlet_mean(alpha, t_large, n_large, c.policy, large_rng);
  const double var = variance_estimate(xl.values()).variance;
  const double bound = 2.0 * var_alpha / t_large;
  csv << "variance_contraction," << fmt(t_large) << ',' << fmt(var) << ',' << fmt(bound) << ','
      << (var < bound ? 1 : 0) << '\n';
  checks.push_back({"t=" + fmt(t_large) + " sample variance below 2 var(alpha)/t", var < bound,
                    "var=" + fmt(var) + " bound=" + fmt(bound)});
  return checks;
}

inline std::vector<Check> james(const ExperimentConfig& c, std::ostream& csv) {
  const GoverningMeasure alpha = measure_or(c, "bernoulli");
  const double t0 = config::number(c.keys, "t0", 1.0);
  if (!(t0 > 0.0)) throw ConfigError("james: t0 must be > 0");
  const RngStream base(c.seed, 0);
  const GoverningMeasure origin = GoverningMeasure::point_mass(Point(alpha.dimension(), 0.0));
  csv_header(csv, c, "measure=" + alpha.describe() + " t0=" + fmt(t0));
  csv << "check,t,D,p_value,pass\n";
  std::vector<Check> checks;
  std::uint64_t stream = 0;
  for (double t : c.t_grid) {
    RngStream rng = base.substream(stream++);
    const EmpiricalSample agg = sample_james_aggregation({{t0, origin}, {t, alpha}}, c.n, c.policy, rng);
    if (alpha.dimension() == 1) {
      if (const auto* atoms = alpha.as<family::DiscreteAtoms>()) {
        // t0 delta_0 + t alpha as one governing measure of intensity t0 + t
        std::vector<Atom> mixed{{{0.0}, t0 / (t0 + t)}};
        for (const auto& a : atoms->atoms) {
          const double w = a.weight * t / (t0 + t);
          if (a.x[0] == 0.0) mixed.front().weight += w;
          else mixed.push_back({a.x, w});
        }
        const GoverningMeasure combined = GoverningMeasure::atoms(mixed);
        KSReport r;
        std::string name;
        if (const auto law = curve_of(combined, t0 + t)) {
          r = ks_one_sample(agg, [&](double x) { return cdf(*law, x); });
          name = "vs " + describe(*law);
        } else {
          RngStream ref_rng = base.substream(1000 + stream);
          r = ks_two_sample(agg, sample_dirichlet_mean(combined, t0 + t, c.n, c.policy, ref_rng));
          name = "vs stick-breaking of the combined measure";
        }
        csv << "aggregate," << fmt(t) << ',' << fmt(r.statistic) << ',' << fmt(r.p_value) << ',' << (r.pass ? 1 : 0) << '\n';
        checks.push_back({"t0=" + fmt(t0) + " t=" + fmt(t) + " aggregate " + name, r.pass, ks_detail(r)});
      }
      RngStream one_rng = base.substream(2000 + stream), ref_rng = base.substream(3000 + stream);
      const EmpiricalSample single = sample_james_aggregation({{t, alpha}}, c.n, c.policy, one_rng);
      const KSReport r = ks_two_sample(single, sample_dirichlet_mean(alpha, t, c.n, c.policy, ref_rng));
      csv << "single_part," << fmt(t) << ',' << fmt(r.statistic) << ',' << fmt(r.p_value) << ',' << (r.pass ? 1 : 0) << '\n';
      checks.push_back({"t=" + fmt(t) + " single part matches stick-breaking", r.pass, ks_detail(r)});
    }
  }
  return checks;
}

}  // namespace experiments

/// The static experiment registry.
inline const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry{
      {"curve-ks", "closed-form curves: Bernoulli -> beta(tp,tq), arcsine -> beta(t+1/2,t+1/2), beta-prime, circle",
       {0.5, 1.0, 2.0, 4.0}, experiments::curve_ks},
      {"convex-order", "t -> mu(t alpha) decreases in the convex order, and mu(t alpha) is below alpha",
       {0.5, 1.0, 2.0, 4.0, 8.0}, experiments::convex_order},
      {"moments", "moment recursion along the curve, variance var(alpha)/(t+1), Q_k non-negativity",
       {0.5, 1.0, 2.0}, experiments::moments},
      {"cr-identity", "transform identity E(1 - isX)^{-t} = exp(-t E log(1 - isB)) and its Stieltjes form",
       {1.0}, experiments::cr_identity},
      {"ode-residual", "Stieltjes transform ODE n y y^(n-1) = y^(n) and power identity hold only for Cauchy",
       {1.0}, experiments::ode_residual_experiment},
      {"cauchy-invariance", "mu(t c) = c for Cauchy c at every t, and mu(t c o alpha) = c o mu(t alpha)",
       {1.0, 10.0}, experiments::cauchy_invariance},
      {"trefoil", "median curve of the three-atom planar Cauchy law, spectral sampler characteristic function",
       {1.0}, experiments::trefoil},
      {"beta-identity", "X_b ~ (1-U) X_b + U X_a with U ~ beta(2a, b-a)", {1.0}, experiments::beta_identity},
      {"limits", "mu(t alpha) -> alpha as t -> 0 and -> delta_m as t -> infinity", {1.0}, experiments::limits},
      {"james", "Y_0 X_0 + ... + Y_n X_n ~ mu(t_0 alpha_0 + ... + t_n alpha_n)", {2.0}, experiments::james},
  };
  return registry;
}

inline const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace dcurve
