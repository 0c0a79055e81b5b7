// Independent test oracles. Everything here is written from the
// definitions, on purpose not sharing code with the library implementation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pbr/rng.hpp"

namespace oracle {

// ---- per-bin distance oracles (long double, straight loops) ----

inline long double jd_term(long double a, long double b) {
  long double t = 0.0L;
  if (a > 0.0L) t += a * std::log(2.0L * a / (a + b));
  if (b > 0.0L) t += b * std::log(2.0L * b / (a + b));
  return t;
}

inline long double jd(std::span<const double> x, std::span<const double> y) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) continue;
    s += jd_term(x[i], y[i]);
  }
  return s;
}

inline long double pb_variance(std::span<const double> x, std::span<const double> y) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) continue;
    const long double e = jd_term(x[i], y[i]);
    s += e * (1.0L - e);
  }
  return s;
}

inline long double pbr(std::span<const double> x, std::span<const double> y) {
  return pb_variance(x, y) / (static_cast<long double>(x.size()) - jd(x, y));
}

inline long double chi2(std::span<const double> x, std::span<const double> y) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double d = static_cast<long double>(x[i]) - y[i];
    const long double t = static_cast<long double>(x[i]) + y[i];
    if (t > 0.0L) s += d * d / t;
  }
  return s;
}

// ---- Poisson-Binomial pmf by exhaustive subset enumeration (N <= ~20) ----

inline std::vector<double> pb_pmf_bruteforce(std::span<const double> p) {
  const std::size_t n = p.size();
  std::vector<long double> pmf(n + 1, 0.0L);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    long double prob = 1.0L;
    int successes = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) {
        prob *= p[i];
        ++successes;
      } else {
        prob *= 1.0L - p[i];
      }
    }
    pmf[successes] += prob;
  }
  return std::vector<double>(pmf.begin(), pmf.end());
}

// ---- K-S statistic by exhaustive breakpoint sweep ----

inline double ks_statistic_bruteforce(std::span<const double> x, std::span<const double> y) {
  std::vector<double> points(x.begin(), x.end());
  points.insert(points.end(), y.begin(), y.end());
  double d = 0.0;
  for (double t : points) {
    double fx = 0.0, fy = 0.0;
    for (double v : x)

      if (v <= t) fx += 1.0;
    for (double v : y)
      if (v <= t) fy += 1.0;
    fx /= static_cast<double>(x.size());
    fy /= static_cast<double>(y.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

// ---- Wilcoxon exact null by sign-flip enumeration (own ranking code) ----

struct WilcoxonEnumeration {
  double w_statistic;   // min(W+, W-)
  double p_one_sided;   // P(W+ <= observed min)
  double p_two_sided;   // P(W+ <= w) + P(W+ >= S - w), overlap counted once
};

inline WilcoxonEnumeration wilcoxon_bruteforce(std::span<const double> x,
                                               std::span<const double> y) {
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) diffs.push_back(x[i] - y[i]);
  }
  const std::size_t n = diffs.size();
  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(diffs[i]);

  // average ranks, quadratic on purpose
  std::vector<double> rank(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (magnitude[j] < magnitude[i]) below += 1.0;
      if (magnitude[j] == magnitude[i]) equal += 1.0;
    }
    rank[i] = below + (equal + 1.0) / 2.0;
  }

  double w_plus = 0.0, w_minus = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (diffs[i] > 0.0) w_plus += rank[i];
    else w_minus += rank[i];
  }
  const double w = std::min(w_plus, w_minus);

  std::uint64_t low_hits = 0, high_hits = 0, both_hits = 0;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double wp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) wp += rank[i];
    }
    const bool low = wp <= w + 1e-9;
    const bool high = wp >= total - w - 1e-9;
    if (low) ++low_hits;
    if (high) ++high_hits;
    if (low && high) ++both_hits;
  }
  WilcoxonEnumeration result;
  result.w_statistic = w;
  result.p_one_sided = static_cast<double>(low_hits) / static_cast<double>(count);
  result.p_two_sided = std::min(
      1.0, static_cast<double>(low_hits + high_hits - both_hits) / static_cast<double>(count));
  return result;
}

// ---- random normalized histograms for property tests ----

inline std::vector<double> random_histogram(pbr::Rng& rng, std::size_t dims,
                                            bool allow_zeros = true) {
  std::vector<double> v(dims);
  double sum = 0.0;
  for (auto& t : v) {
    t = rng.gamma(0.7);
    sum += t;
  }
  if (allow_zeros && rng.next_double() < 0.3) {
    const std::size_t k = static_cast<std::size_t>(rng.next_below(dims));
    sum -= v[k];
    v[k] = 0.0;
  }
  if (sum <= 0.0) {
    v[0] = 1.0;
    sum = 1.0;
  }
  for (auto& t : v) t /= sum;
  return v;
}

}  // namespace oracle
