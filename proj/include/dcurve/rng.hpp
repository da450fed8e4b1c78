#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dcurve {

/// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 random bits; no state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// A reproducible random stream identified by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// counter and the block index the lower half, so streams with distinct ids
/// never share a counter value and need no coordination. Satisfies
/// UniformRandomBitGenerator with 64-bit output.
///
/// A single RngStream must not be shared between threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (cursor_ == 4) refill();
    const std::uint64_t lo = buffer_[cursor_];
    const std::uint64_t hi = buffer_[cursor_ + 1];
    cursor_ += 2;
    return (hi << 32) | lo;
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; deterministic in (seed, stream_id, index).
  RngStream substream(std::uint64_t index) const noexcept {
    return RngStream(seed_, mix(stream_id_ ^ mix(index + 0x632BE59BD9B4E019ull)));
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    // splitmix64 finalizer
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  void refill() noexcept {
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                              static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = Philox4x32::block(ctr, key);
    ++block_;
    cursor_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int cursor_ = 4;
};

// ---------------------------------------------------------------------------
// Variates. Everything below draws only through RngStream, so results are
// identical across standard libraries.

/// Uniform on the open interval (0,1), 53-bit resolution.
inline double uniform01(RngStream& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal, Marsaglia polar method (second value discarded).
inline double standard_normal(RngStream& rng) noexcept {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

inline double standard_exponential(RngStream& rng) noexcept {
  return -std::log(uniform01(rng));
}

inline double log_sum_exp(double a, double b) noexcept {
  const double m = a > b ? a : b;
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// log of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang for shape >= 1; for shape < 1 the boost
/// G(a) = G(a+1) U^{1/a} is applied in log space so that tiny shapes
/// (t / 2^k in the dyadic sampler) never underflow.
inline double log_gamma_variate(RngStream& rng, double shape) noexcept {
  if (shape < 1.0) {
    return log_gamma_variate(rng, shape + 1.0) + std::log(uniform01(rng)) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

inline double gamma_variate(RngStream& rng, double shape) noexcept {
  return std::exp(log_gamma_variate(rng, shape));
}

/// A beta draw kept in log form: log Z and log(1 - Z), both accurate even
/// when Z is within round-off of 0 or 1.
struct LogBetaDraw {
  double log_z;
  double log_1mz;
  double value() const noexcept { return std::exp(log_z); }
  double complement() const noexcept { return std::exp(log_1mz); }
};

/// Beta(a, b) in log form. Johnk's algorithm when both shapes are <= 1
/// (acceptance rate Gamma(a+1)Gamma(b+1)/Gamma(a+b+1) >= 1/2), otherwise a
/// ratio of log-gamma variates.
inline LogBetaDraw log_beta_variate(RngStream& rng, double a, double b) noexcept {
  if (a <= 1.0 && b <= 1.0) {
    for (;;) {
      const double x = std::log(uniform01(rng)) / a;
      const double y = std::log(uniform01(rng)) / b;
      const double s = log_sum_exp(x, y);
      if (s <= 0.0) return {x - s, y - s};
    }
  }
  const double ga = log_gamma_variate(rng, a);
  const double gb = log_gamma_variate(rng, b);
  const double s = log_sum_exp(ga, gb);
  return {ga - s, gb - s};
}

inline double beta_variate(RngStream& rng, double a, double b) noexcept {
  if (a == 0.5 && b == 0.5) {
    const double s = std::sin(0.5 * std::numbers::pi * uniform01(rng));
    return s * s;
  }
  return log_beta_variate(rng, a, b).value();
}

/// Standard totally skewed 1-stable variate, characteristic function
/// exp(-|u| - i (2/pi) u log|u|) (Chambers-Mallows-Stuck, alpha = 1, beta = 1).
inline double skewed_stable1_variate(RngStream& rng) noexcept {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  const double v = std::numbers::pi * (uniform01(rng) - 0.5);
  const double w = standard_exponential(rng);
  const double shifted = half_pi + v;
  return (shifted * std::tan(v) - std::log(half_pi * w * std::cos(v) / shifted)) / half_pi;
}

}  // namespace dcurve
