#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pbr {

/// Deterministic random generator with a pinned algorithm for every sampler,
/// so seeded runs are reproducible independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // warm up so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  /// splitmix64 step.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double next_double_open() { return 1.0 - next_double(); }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller (cosine branch only, stateless).
  double normal() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(next_double_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_double_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Dirichlet draw; zero-alpha components come out exactly zero.
  std::vector<double> dirichlet(std::span<const double> alpha) {
    std::vector<double> out(alpha.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] > 0.0) {
        out[i] = gamma(alpha[i]);
        sum += out[i];
      }
    }
    if (sum <= 0.0) {
      // degenerate draw (all gammas underflowed); fall back to the mean
      double total = 0.0;
      for (double a : alpha) total += a;
      for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = alpha[i] / total;
      return out;
    }
    for (double& v : out) v /= sum;
    return out;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[next_below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Counter-based sub-seed derivation: independent streams for (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (index + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace pbr
