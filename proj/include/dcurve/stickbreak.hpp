#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace dcurve {

/// How the infinite Sethuraman series is cut.
struct TruncationPolicy {
  enum class Mode { fixed_n, tail_epsilon };
  enum class Tail { drop_renormalize, absorb_into_fresh_atom };

  Mode mode = Mode::tail_epsilon;
  std::size_t n = 0;
  double epsilon = 1e-12;
  Tail tail = Tail::absorb_into_fresh_atom;

  static TruncationPolicy fixed(std::size_t n, Tail tail = Tail::absorb_into_fresh_atom) {
    if (n < 1) throw std::invalid_argument("TruncationPolicy: N must be >= 1");
    return {Mode::fixed_n, n, 0.0, tail};
  }

  static TruncationPolicy tail_below(double epsilon, Tail tail = Tail::absorb_into_fresh_atom) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("TruncationPolicy: epsilon must lie in (0,1)");
    return {Mode::tail_epsilon, 0, epsilon, tail};
  }

  static TruncationPolicy standard() { return tail_below(1e-12); }

  std::string describe() const {
    std::string s = mode == Mode::fixed_n ? "fixed_N=" + std::to_string(n)
                                          : "tail_epsilon=" + numeric::format_double(epsilon);
    return s + (tail == Tail::absorb_into_fresh_atom ? " absorb" : " renormalize");
  }
};

/// W_1..W_N and the leftover stick T_N = prod (1 - Y_k).
struct StickBreakWeights {
  double t;
  std::vector<double> weights;
  double tail;
};

namespace detail {

inline void check_intensity(double t, const char* where) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(where) + ": t must be > 0");
}

/// Walks the sticks of one realization, calling visit(W_n) for each kept
/// weight, and returns the final tail T_N. Y ~ beta(1,t) is drawn as
/// 1 - U^{1/t}; the remaining stick is tracked in log form and each weight
/// is the difference of consecutive remainders, so the weights and the tail
/// telescope to 1.
template <class Visit>
double walk_sticks(double t, const TruncationPolicy& policy, RngStream& rng, Visit&& visit) {
  double log_rest = 0.0;
  double rest = 1.0;
  for (std::size_t k = 1;; ++k) {
    log_rest += std::log(uniform01(rng)) / t;
    const double next = std::exp(log_rest);
    visit(rest - next);
    rest = next;
    if (policy.mode == TruncationPolicy::Mode::fixed_n ? k >= policy.n : rest < policy.epsilon) return rest;
  }
}

/// One realization of sum_n W_n phi(B_n) accumulated into `acc`, where
/// phi(B, out) writes acc.size() values. Tail handling follows `policy`.
template <class Phi>
void accumulate_stick_sum(const GoverningMeasure& measure, double t, const TruncationPolicy& policy,
                          RngStream& rng, std::span<double> acc, std::span<double> scratch_b,
                          std::span<double> scratch_phi, Phi&& phi) {
  std::fill(acc.begin(), acc.end(), 0.0);
  const double tail = walk_sticks(t, policy, rng, [&](double w) {
    measure.draw(rng, scratch_b);
    phi(std::span<const double>(scratch_b), scratch_phi);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * scratch_phi[i];
  });
  if (policy.tail == TruncationPolicy::Tail::absorb_into_fresh_atom) {
    measure.draw(rng, scratch_b);
    phi(std::span<const double>(scratch_b), scratch_phi);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tail * scratch_phi[i];
  } else {
    for (double& v : acc) v /= 1.0 - tail;
  }
}

inline void check_policy(const GoverningMeasure& measure, const TruncationPolicy& policy, const char* where) {
  if (policy.tail == TruncationPolicy::Tail::drop_renormalize && measure.is_heavy_tailed())
    throw std::invalid_argument(std::string(where) + ": heavy-tailed " + measure.describe() +
                                " requires absorb_into_fresh_atom");
}

inline void check_count(std::size_t n, const char* where) {
  if (n < 1) throw std::invalid_argument(std::string(where) + ": n must be >= 1");
}

}  // namespace detail

/// One realization of the Sethuraman weights.
inline StickBreakWeights stick_break_weights(double t, const TruncationPolicy& policy, RngStream& rng) {
  detail::check_intensity(t, "stick_break_weights");
  StickBreakWeights out{t, {}, 1.0};
  out.tail = detail::walk_sticks(t, policy, rng, [&](double w) { out.weights.push_back(w); });
  return out;
}

/// One draw of X_t = sum W_n B_n written to `out` (size measure.dimension()).
inline void draw_dirichlet_mean(const GoverningMeasure& measure, double t, const TruncationPolicy& policy,
                                RngStream& rng, std::span<double> out) {
  const std::size_t d = measure.dimension();
  std::vector<double> b(d), phi(d);
  detail::accumulate_stick_sum(measure, t, policy, rng, out, b, phi,
                               [](std::span<const double> x, std::span<double> y) {
                                 std::copy(x.begin(), x.end(), y.begin());
                               });
}

/// n approximate draws of X_t ~ mu(t alpha) by truncated stick-breaking.
inline EmpiricalSample sample_dirichlet_mean(const GoverningMeasure& measure, double t, std::size_t n,
                                             const TruncationPolicy& policy, RngStream& rng) {
  detail::check_intensity(t, "sample_dirichlet_mean");
  detail::check_count(n, "sample_dirichlet_mean");
  detail::check_policy(measure, policy, "sample_dirichlet_mean");
  const std::size_t d = measure.dimension();
  std::vector<double> draws(n * d), b(d), phi(d);
  for (std::size_t i = 0; i < n; ++i) {
    detail::accumulate_stick_sum(measure, t, policy, rng, std::span<double>(draws.data() + i * d, d), b, phi,
                                 [](std::span<const double> x, std::span<double> y) {
                                   std::copy(x.begin(), x.end(), y.begin());
                                 });
  }
  return EmpiricalSample(d, std::move(draws),
                         {measure.describe(), t, "stick_breaking", rng.seed(), rng.stream_id(), policy.describe()});
}

inline EmpiricalSample sample_dirichlet_mean(const GoverningMeasure& measure, double t, std::size_t n,
                                             RngStream& rng) {
  return sample_dirichlet_mean(measure, t, n, TruncationPolicy::standard(), rng);
}

/// n draws of the scalar sum_n W_n |B_n|, the mean of |x| under P_t.
inline EmpiricalSample sample_mean_of_norm(const GoverningMeasure& measure, double t, std::size_t n,
                                           const TruncationPolicy& policy, RngStream& rng) {
  detail::check_intensity(t, "sample_mean_of_norm");
  detail::check_count(n, "sample_mean_of_norm");
  detail::check_policy(measure, policy, "sample_mean_of_norm");
  std::vector<double> draws(n), b(measure.dimension()), phi(1);
  for (std::size_t i = 0; i < n; ++i) {
    detail::accumulate_stick_sum(measure, t, policy, rng, std::span<double>(&draws[i], 1), b, phi,
                                 [](std::span<const double> x, std::span<double> y) { y[0] = norm(x); });
  }
  return EmpiricalSample(1, std::move(draws),
                         {"|" + measure.describe() + "|", t, "stick_breaking_norm", rng.seed(), rng.stream_id(),
                          policy.describe()});
}

/// ceil(log(1e-12) / log(t/(t+1))) capped at 10^4.
inline std::size_t default_fixed_point_depth(double t) {
  detail::check_intensity(t, "default_fixed_point_depth");
  const double steps = std::ceil(std::log(1e-12) / std::log(t / (t + 1.0)));
  return static_cast<std::size_t>(std::clamp(steps, 1.0, 1e4));
}

/// n draws from `depth` steps of x <- (1 - Y) x + Y B started at x = 0.
inline EmpiricalSample sample_fixed_point(const GoverningMeasure& measure, double t, std::size_t n,
                                          std::size_t depth, RngStream& rng) {
  detail::check_intensity(t, "sample_fixed_point");
  detail::check_count(n, "sample_fixed_point");
  if (depth < 1) throw std::invalid_argument("sample_fixed_point: depth must be >= 1");
  const std::size_t d = measure.dimension();
  std::vector<double> draws(n * d, 0.0), b(d);
  for (std::size_t i = 0; i < n; ++i) {
    double* x = draws.data() + i * d;
    for (std::size_t k = 0; k < depth; ++k) {
      const double log_keep = std::log(uniform01(rng)) / t;
      const double keep = std::exp(log_keep);
      const double y = -std::expm1(log_keep);
      measure.draw(rng, b);
      for (std::size_t j = 0; j < d; ++j) x[j] = keep * x[j] + y * b[j];
    }
  }
  return EmpiricalSample(d, std::move(draws),
                         {measure.describe(), t, "fixed_point", rng.seed(), rng.stream_id(),
                          "depth=" + std::to_string(depth)});
}

inline EmpiricalSample sample_fixed_point(const GoverningMeasure& measure, double t, std::size_t n,
                                          RngStream& rng) {
  return sample_fixed_point(measure, t, n, default_fixed_point_depth(t), rng);
}

/// A draw of (W_1..W_{2^k}) ~ Dirichlet(t/2^k, ..., t/2^k) from a binary tree
/// of symmetric beta splits. Level h (1-based) splits every node with
/// Z ~ beta(t/2^h, t/2^h): bit i_h = 0 keeps 1 - Z, i_h = 1 takes Z. Leaf
/// j = 1 + sum_h i_h 2^{h-1} sits at vector position j - 1, so the first
/// split is the least significant bit. Computed in log space because the
/// leaf shapes t/2^k make most weights astronomically small.
inline std::vector<double> dyadic_weights(double t, int k, RngStream& rng) {
  detail::check_intensity(t, "dyadic_weights");
  if (k < 1 || k > 30) throw std::invalid_argument("dyadic_weights: level k must lie in [1, 30]");
  const std::size_t leaves = std::size_t{1} << k;
  std::vector<double> log_w(leaves, 0.0);
  double shape = t;
  for (int h = 1; h <= k; ++h) {
    shape *= 0.5;
    const std::size_t half = std::size_t{1} << (h - 1);
    for (std::size_t p = 0; p < half; ++p) {
      const LogBetaDraw z = log_beta_variate(rng, shape, shape);
      log_w[p + half] = log_w[p] + z.log_z;
      log_w[p] += z.log_1mz;
    }
  }
  for (double& v : log_w) v = std::exp(v);
  return log_w;
}

/// n draws of M_{2^k} = sum_j W_j B_j with dyadic Dirichlet weights.
inline EmpiricalSample sample_mean_dyadic(const GoverningMeasure& measure, double t, int k, std::size_t n,
                                          RngStream& rng) {
  detail::check_intensity(t, "sample_mean_dyadic");
  detail::check_count(n, "sample_mean_dyadic");
  const std::size_t d = measure.dimension();
  std::vector<double> draws(n * d, 0.0), b(d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> w = dyadic_weights(t, k, rng);
    double* x = draws.data() + i * d;
    for (double wj : w) {
      measure.draw(rng, b);
      for (std::size_t j = 0; j < d; ++j) x[j] += wj * b[j];
    }
  }
  return EmpiricalSample(d, std::move(draws),
                         {measure.describe(), t, "dyadic", rng.seed(), rng.stream_id(), "k=" + std::to_string(k)});
}

/// One component (t_j, alpha_j) of a James aggregation.
struct JamesPart {
  double t;
  GoverningMeasure measure;
};

/// n draws of sum_j Y_j X_j with (Y_j) ~ Dirichlet(t_0..t_n) independent of
/// X_j ~ mu(t_j alpha_j). The result follows mu(sum_j t_j alpha_j).
inline EmpiricalSample sample_james_aggregation(const std::vector<JamesPart>& parts, std::size_t n,
                                                const TruncationPolicy& policy, RngStream& rng) {
  if (parts.empty()) throw std::invalid_argument("sample_james_aggregation: no parts");
  detail::check_count(n, "sample_james_aggregation");
  const std::size_t d = parts.front().measure.dimension();
  std::string description = "james{";
  for (std::size_t j = 0; j < parts.size(); ++j) {
    detail::check_intensity(parts[j].t, "sample_james_aggregation");
    if (parts[j].measure.dimension() != d)
      throw std::invalid_argument("sample_james_aggregation: dimension mismatch between parts");
    detail::check_policy(parts[j].measure, policy, "sample_james_aggregation");
    if (j) description += ";";
    description += numeric::format_double(parts[j].t) + "*" + parts[j].measure.describe();
  }
  description += "}";

  std::vector<double> draws(n * d, 0.0), x(d), log_g(parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    double log_total = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < parts.size(); ++j) {
      log_g[j] = log_gamma_variate(rng, parts[j].t);
      log_total = log_sum_exp(log_total, log_g[j]);
    }
    double* out = draws.data() + i * d;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const double y = std::exp(log_g[j] - log_total);
      draw_dirichlet_mean(parts[j].measure, parts[j].t, policy, rng, x);
      for (std::size_t c = 0; c < d; ++c) out[c] += y * x[c];
    }
  }
  double t_total = 0.0;
  for (const auto& p : parts) t_total += p.t;
  return EmpiricalSample(d, std::move(draws),
                         {description, t_total, "james", rng.seed(), rng.stream_id(), policy.describe()});
}

inline EmpiricalSample sample_james_aggregation(const std::vector<JamesPart>& parts, std::size_t n,
                                                RngStream& rng) {
  return sample_james_aggregation(parts, n, TruncationPolicy::standard(), rng);
}

}  // namespace dcurve
