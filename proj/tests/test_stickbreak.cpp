#include <dcurve/exact.hpp>
#include <dcurve/stats.hpp>
#include <dcurve/stickbreak.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

using namespace dcurve;

TEST(TruncationPolicy, Validation) {
  EXPECT_THROW(TruncationPolicy::fixed(0), std::invalid_argument);
  EXPECT_THROW(TruncationPolicy::tail_below(0.0), std::invalid_argument);
  EXPECT_THROW(TruncationPolicy::tail_below(1.0), std::invalid_argument);
  EXPECT_EQ(TruncationPolicy::standard().epsilon, 1e-12);
}

TEST(StickBreakWeights, WeightsPlusTailSumToOne) {
  RngStream base(31, 0);
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream rng = base.substream(i);
    const double t = 0.05 + 20.0 * uniform01(rng);
    const auto w = stick_break_weights(t, TruncationPolicy::standard(), rng);
    const double total = std::accumulate(w.weights.begin(), w.weights.end(), 0.0) + w.tail;
    ASSERT_NEAR(total, 1.0, 1e-12) << "t " << t;
    ASSERT_LT(w.tail, 1e-12);
    for (double x : w.weights) ASSERT_GE(x, 0.0);
  }
}

TEST(StickBreakWeights, FixedLength) {
  RngStream rng(32, 0);
  const auto w = stick_break_weights(2.0, TruncationPolicy::fixed(17), rng);
  EXPECT_EQ(w.weights.size(), 17u);
  EXPECT_NEAR(std::accumulate(w.weights.begin(), w.weights.end(), 0.0) + w.tail, 1.0, 1e-12);
}

TEST(StickBreakWeights, FirstWeightIsBeta1t) {
  RngStream rng(33, 0);
  const double t = 3.0;
  std::vector<double> first(20000);
  for (double& v : first) v = stick_break_weights(t, TruncationPolicy::fixed(3), rng).weights[0];
  const auto r = ks_one_sample(first, [&](double x) { return oracle::beta_cdf(1.0, t, x); });
  EXPECT_TRUE(r.pass) << r.p_value;
}

TEST(DirichletMean, RenormalizeRejectedForHeavyTails) {
  RngStream rng(34, 0);
  const auto renorm = TruncationPolicy::tail_below(1e-12, TruncationPolicy::Tail::drop_renormalize);
  EXPECT_THROW(sample_dirichlet_mean(GoverningMeasure::cauchy(0.0, 1.0), 1.0, 10, renorm, rng), std::invalid_argument);
  EXPECT_NO_THROW(sample_dirichlet_mean(GoverningMeasure::bernoulli(0.5), 1.0, 10, renorm, rng));
}

TEST(DirichletMean, InvalidArguments) {
  RngStream rng(35, 0);
  EXPECT_THROW(sample_dirichlet_mean(GoverningMeasure::uniform01(), 0.0, 10, rng), std::invalid_argument);
  EXPECT_THROW(sample_dirichlet_mean(GoverningMeasure::uniform01(), 1.0, 0, rng), std::invalid_argument);
}

TEST(DirichletMean, SameSeedSameSample) {
  RngStream a(36, 2), b(36, 2);
  const auto x = sample_dirichlet_mean(GoverningMeasure::uniform01(), 1.5, 500, a);
  const auto y = sample_dirichlet_mean(GoverningMeasure::uniform01(), 1.5, 500, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x.values()[i], y.values()[i]);
}

TEST(DirichletMean, PointMassIsFixed) {
  RngStream rng(37, 0);
  const auto x = sample_dirichlet_mean(GoverningMeasure::point_mass({0.3, -2.0}), 0.7, 200, rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_NEAR(x.row(i)[0], 0.3, 1e-12);
    ASSERT_NEAR(x.row(i)[1], -2.0, 1e-12);
  }
}

TEST(DirichletMean, BernoulliGivesBeta) {
  RngStream rng(38, 0);
  const auto x = sample_dirichlet_mean(GoverningMeasure::bernoulli(0.3), 2.0, 20000, rng);
  const auto r = ks_one_sample(x, [](double v) { return oracle::beta_cdf(0.6, 1.4, v); });
  EXPECT_TRUE(r.pass) << r.p_value;
}

TEST(DirichletMean, TailPolicyDoesNotChangeTheLaw) {
  RngStream a(39, 0), b(39, 1);
  const auto alpha = GoverningMeasure::beta(0.5, 0.5);
  const auto absorb = sample_dirichlet_mean(alpha, 1.0, 20000, TruncationPolicy::fixed(60), a);
  const auto renorm = sample_dirichlet_mean(
      alpha, 1.0, 20000, TruncationPolicy::tail_below(1e-12, TruncationPolicy::Tail::drop_renormalize), b);
  EXPECT_TRUE(ks_two_sample(absorb, renorm).pass);
}

TEST(MeanOfNorm, CircleHasUnitNorm) {
  RngStream rng(40, 0);
  const auto x = sample_mean_of_norm(GoverningMeasure::uniform_circle(), 1.0, 100, TruncationPolicy::standard(), rng);
  for (double v : x.values()) ASSERT_NEAR(v, 1.0, 1e-12);
}

TEST(FixedPoint, DefaultDepth) {
  EXPECT_EQ(default_fixed_point_depth(1.0), 40u);
  EXPECT_EQ(default_fixed_point_depth(0.5), 26u);
  EXPECT_EQ(default_fixed_point_depth(1e6), 10000u);
}

TEST(FixedPoint, MatchesStickBreaking) {
  const auto alpha = GoverningMeasure::beta(2.0, 1.0);
  RngStream a(41, 0), b(41, 1);
  const auto x = sample_fixed_point(alpha, 1.5, 20000, a);
  const auto y = sample_dirichlet_mean(alpha, 1.5, 20000, b);
  const auto r = ks_two_sample(x, y);
  EXPECT_TRUE(r.pass) << r.p_value;
}

TEST(Dyadic, WeightsSumToOne) {
  RngStream rng(42, 0);
  for (int k = 1; k <= 12; ++k) {
    const auto w = dyadic_weights(0.7, k, rng);
    ASSERT_EQ(w.size(), std::size_t{1} << k);
    ASSERT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_THROW(dyadic_weights(1.0, 0, rng), std::invalid_argument);
  EXPECT_THROW(dyadic_weights(1.0, 31, rng), std::invalid_argument);
}

TEST(Dyadic, MarginalsAreDirichlet) {
  RngStream rng(43, 0);
  const double t = 2.0;
  const int k = 3;
  std::vector<double> leaf(20000), first_split(20000);
  for (std::size_t i = 0; i < leaf.size(); ++i) {
    const auto w = dyadic_weights(t, k, rng);
    leaf[i] = w[5];
    // even positions are the 1 - Z side of the level-1 split
    first_split[i] = w[0] + w[2] + w[4] + w[6];
  }
  const double s = t / 8.0;
  EXPECT_TRUE(ks_one_sample(leaf, [&](double x) { return oracle::beta_cdf(s, t - s, x); }).pass);
  EXPECT_TRUE(ks_one_sample(first_split, [&](double x) { return oracle::beta_cdf(t / 2.0, t / 2.0, x); }).pass);
}

TEST(Dyadic, MeanApproachesTheCurve) {
  RngStream rng(44, 0);
  const auto x = sample_mean_dyadic(GoverningMeasure::beta(0.5, 0.5), 1.0, 8, 10000, rng);
  const auto r = ks_one_sample(x, [](double v) { return oracle::beta_cdf(1.5, 1.5, v); });
  EXPECT_TRUE(r.pass) << r.p_value;
}

TEST(James, AggregationWithPointMass) {
  const auto alpha = GoverningMeasure::bernoulli(0.5);
  RngStream rng(45, 0);
  const auto x = sample_james_aggregation({{1.0, GoverningMeasure::point_mass({0.0})}, {2.0, alpha}}, 20000, rng);
  // 1 delta_0 + 2 Bernoulli(1/2) = 3 Bernoulli(1/3)
  const auto r = ks_one_sample(x, [](double v) { return oracle::beta_cdf(1.0, 2.0, v); });
  EXPECT_TRUE(r.pass) << r.p_value;
  EXPECT_THROW(sample_james_aggregation({}, 10, rng), std::invalid_argument);
  EXPECT_THROW(sample_james_aggregation({{1.0, alpha}, {1.0, GoverningMeasure::uniform_circle()}}, 10, rng),
               std::invalid_argument);
}
