// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Usage: acceptance <path-to-dcurve-cli> <scratch-dir>

#include <dcurve/dcurve.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace dcurve;

namespace {

// Tolerances and sizes.
constexpr std::size_t kN = 100000;
constexpr std::size_t kDyadicN = 20000;
constexpr int kDyadicLevel = 10;
constexpr double kMomentTol = 1e-12;
constexpr double kDensityMomentTol = 1e-6;
constexpr double kSigmaBand = 3.0;
constexpr double kResidualZeroTol = 1e-10;
constexpr double kResidualFloor = 0.01;
constexpr double kMedianTol = 0.02;
constexpr std::size_t kMedianN = 1000000;
constexpr double kTrefoilR0Tol = 1e-12;
constexpr double kSmallT = 0.01;
constexpr double kLargeT = 1000.0;
constexpr std::size_t kLargeTN = 10000;
constexpr std::uint64_t kSeed = 20240601;

struct Criterion {
  bool pass = true;
  std::vector<std::string> failures;
  std::size_t checks = 0;

  void require(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(double v) { return numeric::format_double(v); }

std::string ks_text(const KSReport& r) { return "D=" + fmt(r.statistic) + " p=" + fmt(r.p_value); }

RngStream stream(std::uint64_t criterion, std::uint64_t index) { return RngStream(kSeed, criterion).substream(index); }

// ---------------------------------------------------------------------------

Criterion ac1_closed_forms() {
  Criterion c;
  std::uint64_t k = 0;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    RngStream rng = stream(1, k++);
    const auto x = sample_dirichlet_mean(GoverningMeasure::bernoulli(0.5), t, kN, rng);
    const auto r = ks_one_sample(x, [&](double v) { return oracle::beta_cdf(t / 2.0, t / 2.0, v); });
    c.require(r.pass, "bernoulli t=" + fmt(t) + " " + ks_text(r));
  }
  for (double t : {1.0, 2.0}) {
    RngStream rng = stream(1, k++);
    const auto x = sample_dirichlet_mean(GoverningMeasure::beta(0.5, 0.5), t, kN, rng);
    const auto r = ks_one_sample(x, [&](double v) { return oracle::beta_cdf(t + 0.5, t + 0.5, v); });
    c.require(r.pass, "arcsine t=" + fmt(t) + " " + ks_text(r));
  }
  for (double t : {1.0, 2.0}) {
    RngStream rng = stream(1, k++);
    const auto x = sample_dirichlet_mean(GoverningMeasure::beta_prime(0.5, 0.5), t, kN, rng);
    const auto r = ks_one_sample(x, [&](double v) { return oracle::beta_cdf(t + 0.5, 0.5, v / (1.0 + v)); });
    c.require(r.pass, "beta-prime t=" + fmt(t) + " " + ks_text(r));
  }
  for (double t : {1.0, 2.0}) {
    RngStream rng = stream(1, k++);
    const auto x = sample_dirichlet_mean(GoverningMeasure::uniform_circle(), t, kN, rng);
    const auto r = ks_one_sample(x.squared_norms(), [&](double v) { return oracle::beta_cdf(1.0, t, v); });
    c.require(r.pass, "circle |X|^2 t=" + fmt(t) + " " + ks_text(r));
  }
  return c;
}

Criterion ac2_sampler_cross_validation() {
  Criterion c;
  std::uint64_t k = 0;
  for (const auto& alpha : {GoverningMeasure::bernoulli(0.5), GoverningMeasure::uniform01(), GoverningMeasure::cauchy(0.0, 1.0)}) {
    for (double t : {0.5, 1.0, 4.0}) {
      RngStream a = stream(2, k++), b = stream(2, k++), d = stream(2, k++);
      const auto stick = sample_dirichlet_mean(alpha, t, kN, a);
      const auto fixed = sample_fixed_point(alpha, t, kN, b);
      const auto dyadic = sample_mean_dyadic(alpha, t, kDyadicLevel, kDyadicN, d);
      const auto r1 = ks_two_sample(stick, fixed);
      const auto r2 = ks_two_sample(stick, dyadic);
      const auto r3 = ks_two_sample(fixed, dyadic);
      const std::string where = alpha.describe() + " t=" + fmt(t);
      c.require(r1.pass, where + " stick/fixed " + ks_text(r1));
      c.require(r2.pass, where + " stick/dyadic " + ks_text(r2));
      c.require(r3.pass, where + " fixed/dyadic " + ks_text(r3));
    }
  }
  return c;
}

Criterion ac3_moments() {
  Criterion c;
  const std::vector<double> bern(6, 0.5);
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const MomentTable table = moment_recursion(bern, t);
    for (int k = 1; k <= 6; ++k) {
      const double exact = oracle::beta_moment(t / 2.0, t / 2.0, k);
      c.require(std::fabs(table.ex[k - 1] - exact) <= kMomentTol,
                "bernoulli t=" + fmt(t) + " k=" + std::to_string(k) + " diff=" + fmt(table.ex[k - 1] - exact));
    }
  }
  const auto uni = GoverningMeasure::uniform01();
  const double recursion = moment_recursion(raw_moments(uni, 2), 1.0).ex[1];
  const double quadrature = oracle::simpson([](double x) { return x * x * oracle::dk_density(x); }, 0.0, 1.0);
  c.require(std::fabs(recursion - 7.0 / 24.0) <= kMomentTol, "uniform E X^2 recursion=" + fmt(recursion));
  c.require(std::fabs(quadrature - 7.0 / 24.0) <= kDensityMomentTol, "uniform E X^2 density quadrature=" + fmt(quadrature));

  std::uint64_t k = 0;
  for (const auto& alpha : {GoverningMeasure::bernoulli(0.5), uni}) {
    const auto m = raw_moments(alpha, 2);
    const double var_alpha = m[1] - m[0] * m[0];
    for (double t : {0.5, 1.0, 2.0}) {
      RngStream rng = stream(3, k++);
      const auto x = sample_dirichlet_mean(alpha, t, kN, rng);
      const auto v = variance_estimate(x.values());
      const double expected = var_alpha / (t + 1.0);
      c.require(std::fabs(v.variance - expected) <= kSigmaBand * v.standard_error,
                alpha.describe() + " t=" + fmt(t) + " var=" + fmt(v.variance) + " expected=" + fmt(expected) +
                    " se=" + fmt(v.standard_error));
    }
  }
  return c;
}

Criterion ac4_convex_order() {
  Criterion c;
  const std::vector<double> ts{0.5, 1.0, 2.0, 4.0, 8.0};
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  // exact beta(t/2, t/2) hinge means, alpha = Bernoulli(1/2) at t = 0
  for (double a : grid) {
    double previous = 0.5 * (1.0 - a);
    for (double t : ts) {
      const double h = oracle::beta_hinge(t / 2.0, t / 2.0, a);
      c.require(h < previous, "exact hinge not strictly decreasing at a=" + fmt(a) + " t=" + fmt(t));
      previous = h;
    }
  }

  std::uint64_t k = 0;
  for (const auto& alpha : {GoverningMeasure::bernoulli(0.5), GoverningMeasure::uniform01()}) {
    std::vector<std::pair<double, EmpiricalSample>> samples;
    RngStream alpha_rng = stream(4, k++);
    samples.emplace_back(0.0, sample_measure(alpha, kN, alpha_rng));
    for (double t : ts) {
      RngStream rng = stream(4, k++);
      samples.emplace_back(t, sample_dirichlet_mean(alpha, t, kN, rng));
    }
    const auto report = convex_order_check(samples, {1.0}, grid);
    c.require(report.consistent, alpha.describe() + " hinge battery" +
                                     (report.worst ? " gap=" + fmt(report.worst->gap) + " slack=" + fmt(report.worst->slack)
                                                   : std::string()));
    if (alpha.as<family::DiscreteAtoms>()) {
      for (std::size_t i = 1; i < samples.size(); ++i) {
        const double t = samples[i].first;
        const auto& curve = report.curves[i];
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const double exact = oracle::beta_hinge(t / 2.0, t / 2.0, grid[j]);
          c.require(std::fabs(curve.estimate[j] - exact) <= curve.half_width[j],
                    "hinge estimate off the exact beta value at t=" + fmt(t) + " a=" + fmt(grid[j]));
        }
      }
    }
    std::vector<std::pair<double, EmpiricalSample>> swapped{{ts[0], samples[2].second}, {ts[1], samples[1].second}};
    c.require(!convex_order_check(swapped, {1.0}, grid).consistent, alpha.describe() + " reversed labels not flagged");
  }
  return c;
}

Criterion ac5_beta_identity() {
  Criterion c;
  std::uint64_t k = 0;
  for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 2.0}}) {
    RngStream rng = stream(5, k++), control = stream(5, k++);
    const auto r = beta_identity_check(a, b, kN, rng);
    c.require(r.ks.pass, "(" + fmt(a) + "," + fmt(b) + ") " + ks_text(r.ks));
    const auto bad = beta_identity_check(a, b, kN, control, 4.0 * a);
    c.require(bad.second_moment.p_value < kKsLevel,
              "(" + fmt(a) + "," + fmt(b) + ") control z=" + fmt(bad.second_moment.z) + " p=" + fmt(bad.second_moment.p_value));
  }
  return c;
}

Criterion ac6_cauchy_invariance() {
  Criterion c;
  std::uint64_t k = 0;
  for (double t : {1.0, 10.0}) {
    RngStream rng = stream(6, k++);
    const auto r = verify_yamato(t, kN, rng);
    c.require(r.pass, "fixed point t=" + fmt(t) + " " + ks_text(r));
  }
  for (const auto& radial : {GoverningMeasure::atoms({{{1.0}, 0.5}, {{2.0}, 0.5}}), GoverningMeasure::uniform01()}) {
    RngStream rng = stream(6, k++);
    const auto r = verify_mult_invariance(radial, 1.0, kN, rng);
    c.require(r.pass, "multiplicative " + radial.describe() + " " + ks_text(r));
  }
  RngStream rng = stream(6, k++);
  const auto control = verify_cauchy_fixed(GoverningMeasure::uniform01(), 1.0, kN, rng);
  c.require(!control.pass, "uniform01 control accepted " + ks_text(control));
  return c;
}

Criterion ac7_transform_identity() {
  Criterion c;
  const std::vector<TransformArgument> where{-2.0, -0.5, 0.5, 1.0, 3.0, UpperHalfPoint(0.0, 1.0), UpperHalfPoint(1.0, 1.0),
                                             UpperHalfPoint(-0.5, 2.0)};
  std::uint64_t k = 0;
  for (const auto& alpha : {GoverningMeasure::bernoulli(0.5), GoverningMeasure::beta(0.5, 0.5), GoverningMeasure::cauchy(0.0, 1.0)}) {
    for (std::size_t i = 0; i < where.size(); ++i) {
      RngStream rng = stream(7, k++);
      const auto r = cr_identity_residual(alpha, 1.0, where[i], kN, rng);
      c.require(r.residual <= kSigmaBand * r.standard_error, alpha.describe() + " argument #" + std::to_string(i) +
                                                                  " residual=" + fmt(r.residual) + " se=" + fmt(r.standard_error));
    }
  }
  return c;
}

Criterion ac8_residuals() {
  Criterion c;
  const auto cauchy = GoverningMeasure::cauchy(0.0, 1.0);
  RngStream rng = stream(8, 0);
  for (int i = 0; i < 5; ++i) {
    const UpperHalfPoint z(-2.0 + 4.0 * uniform01(rng), 0.2 + 1.8 * uniform01(rng));
    for (int n = 1; n <= 5; ++n) {
      const double r = std::abs(ode_residual(cauchy, n, z));
      c.require(r <= kResidualZeroTol, "cauchy ode n=" + std::to_string(n) + " r=" + fmt(r));
    }
    for (int n = 1; n <= 3; ++n) {
      for (int m = n + 1; m <= 5; ++m) {
        const double r = std::abs(power_identity_residual(cauchy, n, m, z));
        c.require(r <= kResidualZeroTol, "cauchy power (" + std::to_string(n) + "," + std::to_string(m) + ") r=" + fmt(r));
      }
    }
  }
  for (const auto& alpha : {GoverningMeasure::beta(0.5, 0.5), GoverningMeasure::bernoulli(0.5)}) {
    for (double im : {1.0, 2.0}) {
      const UpperHalfPoint z(0.0, im);
      double largest = 0.0;
      for (int n = 1; n <= 5; ++n) largest = std::max(largest, std::abs(ode_residual(alpha, n, z)));
      for (int n = 1; n <= 3; ++n)
        for (int m = n + 1; m <= 5; ++m) largest = std::max(largest, std::abs(power_identity_residual(alpha, n, m, z)));
      c.require(largest > kResidualFloor, alpha.describe() + " at " + fmt(im) + "i largest=" + fmt(largest));
    }
    // the quadrature route itself against the closed-form arcsine transform
    if (alpha.as<family::Beta>()) {
      for (double im : {1.0, 2.0}) {
        const Complex z(0.0, im);
        const Complex exact = -1.0 / (std::sqrt(z) * std::sqrt(z - 1.0));
        c.require(std::abs(stieltjes(alpha, UpperHalfPoint(z)) - exact) <= 1e-10, "arcsine stieltjes quadrature");
      }
    }
  }
  return c;
}

Criterion ac9_spectral() {
  Criterion c;
  const double r0 = trefoil_median(0.0);
  c.require(std::fabs(r0 + 2.0 / std::numbers::pi * std::numbers::ln2) <= kTrefoilR0Tol, "r(0)=" + fmt(r0));

  const auto trefoil = SpectralCauchy::trefoil();
  RngStream median_rng = stream(9, 0);
  const auto big = sample_cauchy_rd(trefoil, kMedianN, median_rng);
  for (int k = 0; k < 8; ++k) {
    const double theta = std::numbers::pi * k / 4.0;
    const Point f{std::cos(theta), std::sin(theta)};
    const double diff = median_of(big.project(f)) - trefoil_median(theta);
    c.require(std::fabs(diff) <= kMedianTol, "median theta=" + fmt(theta) + " diff=" + fmt(diff));
  }

  std::uint64_t k = 1;
  for (const auto& spec : {trefoil, SpectralCauchy::uniform_discretized(2)}) {
    RngStream rng = stream(9, k++);
    const auto x = sample_cauchy_rd(spec, kN, rng);
    for (int d = 0; d < 5; ++d) {
      const double theta = 2.0 * std::numbers::pi * uniform01(rng);
      const Point f{std::cos(theta), std::sin(theta)};
      for (const auto& r : characteristic_function_check(spec, x, f, {0.5, 1.0, 2.0}))
        c.require(r.pass, "cf atoms=" + std::to_string(spec.atoms().size()) + " theta=" + fmt(theta) + " r=" + fmt(r.r) +
                              " residual=" + fmt(r.residual) + " se=" + fmt(r.standard_error));
    }
  }
  return c;
}

Criterion ac10_limits() {
  Criterion c;
  RngStream small = stream(10, 0);
  const auto x = sample_dirichlet_mean(GoverningMeasure::uniform01(), kSmallT, kN, small);
  const auto r = ks_one_sample(x, [](double v) { return std::clamp(v, 0.0, 1.0); });
  c.require(r.pass, "t=0.01 vs uniform " + ks_text(r));

  std::uint64_t k = 1;
  for (const auto& alpha : {GoverningMeasure::uniform01(), GoverningMeasure::bernoulli(0.5)}) {
    const auto m = raw_moments(alpha, 2);
    const double bound = 2.0 * (m[1] - m[0] * m[0]) / kLargeT;
    RngStream rng = stream(10, k++);
    const auto y = sample_dirichlet_mean(alpha, kLargeT, kLargeTN, rng);
    const double var = variance_estimate(y.values()).variance;
    c.require(var < bound, alpha.describe() + " var=" + fmt(var) + " bound=" + fmt(bound));
  }
  return c;
}

Criterion ac11_determinism(const std::string& cli, const std::filesystem::path& dir) {
  Criterion c;
  std::filesystem::create_directories(dir);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (const std::string experiment : {"curve-ks", "convex-order", "trefoil"}) {
    std::string outputs[2], summaries[2];
    for (int run = 0; run < 2; ++run) {
      const auto csv = dir / (experiment + ".csv");
      const auto txt = dir / (experiment + ".txt");
      std::filesystem::remove(csv);
      const std::string cmd = "\"" + cli + "\" " + experiment + " --seed 42 --n 20000 --set median_n=20000 --out \"" +
                              csv.string() + "\" > \"" + txt.string() + "\"";
      const int status = std::system(cmd.c_str());
      c.require(status != -1, experiment + " could not start the CLI");
      outputs[run] = slurp(csv);
      summaries[run] = slurp(txt);
    }
    c.require(!outputs[0].empty(), experiment + " produced no CSV");
    c.require(outputs[0] == outputs[1], experiment + " CSV differs between runs");
    c.require(summaries[0] == summaries[1], experiment + " summary differs between runs");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <dcurve-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch = argv[2];

  struct Entry {
    const char* id;
    const char* title;
    std::function<Criterion()> run;
  };
  const std::vector<Entry> entries{
      {"AC1", "closed-form curves pass one-sample KS", ac1_closed_forms},
      {"AC2", "stick-breaking, fixed-point and dyadic samplers agree", ac2_sampler_cross_validation},
      {"AC3", "moment recursion, Diaconis-Kemperman second moment, variance contraction", ac3_moments},
      {"AC4", "hinge means decrease in t, alpha dominates, reversed labels flagged", ac4_convex_order},
      {"AC5", "beta mixture identity holds, wrong mixing law flagged", ac5_beta_identity},
      {"AC6", "Cauchy invariance and multiplicative invariance, uniform control rejected", ac6_cauchy_invariance},
      {"AC7", "transform identity residual within 3 MC standard errors", ac7_transform_identity},
      {"AC8", "Stieltjes ODE and power residuals vanish only for Cauchy", ac8_residuals},
      {"AC9", "spectral sampler characteristic function and trefoil medians", ac9_spectral},
      {"AC10", "limits t -> 0 and t -> infinity", ac10_limits},
      {"AC11", "CLI output is byte-identical across runs", [&] { return ac11_determinism(cli, scratch); }},
  };

  bool all = true;
  for (const auto& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && c.pass;
    std::printf("%-5s %s  %s  (%zu checks, %.1fs)\n", e.id, c.pass ? "PASS" : "FAIL", e.title, c.checks, secs);
    for (const auto& f : c.failures) std::printf("        failed: %s\n", f.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
