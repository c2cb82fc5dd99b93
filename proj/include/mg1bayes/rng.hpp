#pragma once
// Deterministic random number generation for every sampler in the toolkit.
//
// Engine: SplitMix64. The stream for a given 64-bit seed is identical on every
// platform, which the byte-identical reproducibility guarantees rely on.
// Named substreams are derived from one master seed by hashing a textual tag
// (FNV-1a 64) plus an index; the exact derivation is
//
//   derive_seed(master, tag, index) = mix(mix(master ^ fnv1a64(tag)) + index)
//
// where mix(x) is one SplitMix64 output step from state x.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mg1bayes {

namespace detail {
inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix(std::uint64_t x) {
  std::uint64_t z = x + kSplitMixGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
  return detail::mix(detail::mix(master ^ fnv1a64(tag)) + index);
}

// SplitMix64 stream with inverse-cdf and rejection samplers on top. All
// samplers consume the stream strictly left to right, so a seeded Rng yields
// the same draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += detail::kSplitMixGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform01_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double rate) { return -std::log(uniform01_pos()) / rate; }

  // Box-Muller; consumes exactly two words per call.
  double normal() {
    double u1 = uniform01_pos();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang; shapes below one use the boost
  // Gamma(shape+1) * U^{1/shape}, computed in log space by log_gamma_draw.
  double gamma(double shape) { return std::exp(log_gamma_draw(shape)); }

  double gamma(double shape, double rate) { return gamma(shape) / rate; }

  // log of a Gamma(shape, 1) draw; finite for shapes far below one where the
  // draw itself would underflow.
  double log_gamma_draw(double shape) {
    if (shape < 1.0) {
      double u = uniform01_pos();
      return log_gamma_at_least_one(shape + 1.0) + std::log(u) / shape;
    }
    return log_gamma_at_least_one(shape);
  }

  // Beta(a, b) as X/(X+Y) over two log-space Gamma draws, stable for tiny
  // shapes. Zero shapes are the degenerate limits.
  double beta(double a, double b) {
    if (a <= 0.0) return 0.0;
    if (b <= 0.0) return 1.0;
    double lx = log_gamma_draw(a);
    double ly = log_gamma_draw(b);
    double d = ly - lx;
    if (d >= 0.0) {
      double e = std::exp(-d);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
  }

  double weibull(double shape, double scale) {
    return scale * std::pow(-std::log(uniform01_pos()), 1.0 / shape);
  }

 private:
  double log_gamma_at_least_one(double shape) {
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform01_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return std::log(d) + std::log(v);
      }
    }
  }

  std::uint64_t state_;
};

}  // namespace mg1bayes
