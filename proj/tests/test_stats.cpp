#include <dcurve/exact.hpp>
#include <dcurve/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

using namespace dcurve;

TEST(Kolmogorov, SurvivalMatchesScipy) {
  // scipy.stats.kstwobign.sf
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.18), 0.1234538094297657, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.5), 0.022217962616525127, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-14);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(NormalQuantile, MatchesScipy) {
  EXPECT_NEAR(numeric::normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(numeric::normal_quantile(0.9995), 3.2905267314919255, 1e-12);
  EXPECT_NEAR(numeric::two_sided_z(0.95), 1.959963984540054, 1e-12);
}

TEST(KsOneSample, AcceptsCorrectRejectsShifted) {
  RngStream rng(71, 0);
  const auto x = sample_law(law::Beta{2.0, 5.0}, 20000, rng);
  EXPECT_TRUE(ks_one_sample(x, [](double v) { return oracle::beta_cdf(2.0, 5.0, v); }).pass);
  EXPECT_FALSE(ks_one_sample(x, [](double v) { return oracle::beta_cdf(2.2, 5.0, v); }).pass);
}

TEST(KsOneSample, StatisticOnAKnownSample) {
  const std::vector<double> x{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  const auto r = ks_one_sample(x, [](double v) { return v; });
  EXPECT_NEAR(r.statistic, 0.05, 1e-15);
  EXPECT_THROW(ks_one_sample(std::vector<double>(5, 0.5), [](double v) { return v; }), std::invalid_argument);
  EXPECT_THROW(ks_one_sample(x, [](double) { return std::nan(""); }), std::invalid_argument);
}

TEST(KsTwoSample, TiesAdvanceTogether) {
  const std::vector<double> x{0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0};
  const std::vector<double> y{1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
  EXPECT_NEAR(ks_two_sample(x, y).statistic, 0.0, 1e-15);
  const std::vector<double> z{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  EXPECT_NEAR(ks_two_sample(x, z).statistic, 0.2, 1e-15);
}

TEST(KsTwoSample, AcceptsSameLawRejectsDifferent) {
  RngStream a(72, 0), b(72, 1);
  const auto x = sample_law(law::Beta{1.5, 1.5}, 20000, a);
  const auto y = sample_law(law::Beta{1.5, 1.5}, 20000, b);
  const auto z = sample_law(law::Beta{1.0, 1.0}, 20000, b);
  EXPECT_TRUE(ks_two_sample(x, y).pass);
  EXPECT_FALSE(ks_two_sample(x, z).pass);
}

TEST(Hinge, EstimateCoversExactBetaHinge) {
  RngStream rng(73, 0);
  const auto x = sample_law(law::Beta{1.0, 1.0}, 50000, rng);
  const auto curve = hinge_curve(x, {1.0}, {0.1, 0.5, 0.9}, 0.999);
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    const double exact = oracle::beta_hinge(1.0, 1.0, curve.thresholds[i]);
    EXPECT_LE(std::fabs(curve.estimate[i] - exact), curve.half_width[i]) << curve.thresholds[i];
  }
}

TEST(ConvexOrder, SymmetricBetaFamilyIsConsistent) {
  RngStream base(74, 0);
  std::vector<std::pair<double, EmpiricalSample>> samples;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const double t = 1.0 + static_cast<double>(i);
    RngStream rng = base.substream(i);
    samples.emplace_back(t, sample_law(law::Beta{t, t}, 30000, rng));
  }
  const auto report = convex_order_check(samples, {1.0}, {0.2, 0.4, 0.6, 0.8});
  EXPECT_TRUE(report.consistent);
  EXPECT_EQ(report.pairs.size(), 2u);
  std::ostringstream csv;
  write_order_csv(csv, report);
  EXPECT_NE(csv.str().find("s,t,a"), std::string::npos);

  std::vector<std::pair<double, EmpiricalSample>> swapped{{1.0, samples[2].second}, {2.0, samples[0].second}};
  const auto bad = convex_order_check(swapped, {1.0}, {0.2, 0.4, 0.6, 0.8});
  EXPECT_FALSE(bad.consistent);
  ASSERT_TRUE(bad.worst.has_value());
  EXPECT_GT(bad.worst->gap, bad.worst->slack);
}

TEST(ConvexOrder, DifferentMeansAreFlagged) {
  RngStream a(75, 0), b(75, 1);
  std::vector<std::pair<double, EmpiricalSample>> samples;
  samples.emplace_back(1.0, sample_law(law::Beta{2.0, 2.0}, 30000, a));
  samples.emplace_back(2.0, sample_law(law::Beta{3.0, 2.0}, 30000, b));
  EXPECT_FALSE(convex_order_check(samples, {1.0}, {0.5}).consistent);
}

TEST(ConvexOrder, InputValidation) {
  RngStream rng(76, 0);
  std::vector<std::pair<double, EmpiricalSample>> one;
  one.emplace_back(1.0, sample_law(law::Beta{2.0, 2.0}, 100, rng));
  EXPECT_THROW(convex_order_check(one, {1.0}, {0.5}), std::invalid_argument);
}

TEST(BetaIdentity, HoldsAndControlIsFlagged) {
  RngStream rng(77, 0), control(77, 1);
  const auto r = beta_identity_check(1.0, 2.0, 40000, rng);
  EXPECT_TRUE(r.ks.pass);
  EXPECT_EQ(r.u_first_shape, 2.0);
  const auto bad = beta_identity_check(1.0, 2.0, 40000, control, 4.0);
  EXPECT_LT(bad.second_moment.p_value, 1e-3);
  EXPECT_THROW(beta_identity_check(2.0, 1.0, 10, rng), std::invalid_argument);
}

TEST(MomentZTest, DetectsScaleChange) {
  std::vector<double> x(1000), y(1000);
  RngStream rng(78, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = standard_normal(rng);
    y[i] = 1.5 * standard_normal(rng);
  }
  EXPECT_LT(second_moment_ztest(x, y).p_value, 1e-6);
  EXPECT_GT(second_moment_ztest(x, x).p_value, 0.99);
}

TEST(MomentInequality, HoldsForBetaAndUniform) {
  RngStream rng(79, 0);
  for (double s : {0.5, 1.0, 2.0}) {
    const auto r = moment_inequality_check(GoverningMeasure::uniform01(), 2.0, s, 20000, rng);
    EXPECT_TRUE(r.holds) << "s " << s;
    EXPECT_LE(r.ex, r.bound_factor * r.eb + 5.0 * r.ex_se);
    EXPECT_EQ(r.e_norm_mean.has_value(), s < 1.0);
  }
}

TEST(Estimates, MeanAndVariance) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_estimate(v);
  EXPECT_NEAR(m.mean, 2.5, 1e-15);
  EXPECT_NEAR(m.variance, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.standard_error, std::sqrt(5.0 / 12.0), 1e-15);
  EXPECT_NEAR(variance_estimate(v).variance, 5.0 / 3.0, 1e-15);
}
