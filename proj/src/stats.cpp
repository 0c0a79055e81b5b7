#include "pbr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "pbr/error.hpp"
#include "pbr/parallel.hpp"
#include "pbr/rng.hpp"

namespace pbr {

namespace {

/// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
/// Small arguments use the theta-function form of the CDF for stability.
double kolmogorov_survival(double lambda) {
  constexpr double kPi = 3.14159265358979323846;
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // CDF = sqrt(2 pi)/lambda * sum_{k odd} exp(-k^2 pi^2 / (8 lambda^2))
    const double x = kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k < 64; k += 2) {
      const double term = std::exp(-static_cast<double>(k) * k * x);
      sum += term;
      if (term < 1e-16) break;
    }
    const double cdf = std::sqrt(2.0 * kPi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 256; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) {
    raise(ErrorCode::EmptySample, "K-S test needs two non-empty samples");
  }
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());

  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const double value = (i < a.size() && (j >= b.size() || a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] == value) ++i;
    while (j < b.size() && b[j] == value) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }

  const double n_eff = n * m / (n + m);
  TestResult result;
  result.statistic = d;
  result.p_value = d == 0.0 ? 1.0 : kolmogorov_survival(std::sqrt(n_eff) * d);
  result.n_effective = static_cast<int>(std::lround(n_eff));
  return result;
}

namespace {

/// Exact two-sided p by enumerating all 2^n sign assignments in doubled-rank
/// integer space (average ranks of ties stay integral after doubling).
double wilcoxon_exact_p(const std::vector<long long>& ranks2, long long w2_low) {
  const std::size_t n = ranks2.size();
  long long total2 = 0;
  for (long long r : ranks2) total2 += r;
  const long long upper = total2 - w2_low;

  const std::uint64_t count = 1ULL << n;
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    long long w_plus = 0;
    for (std::size_t bit = 0; bit < n; ++bit) {
      if (mask & (1ULL << bit)) w_plus += ranks2[bit];
    }
    if (w_plus <= w2_low || w_plus >= upper) ++hits;
  }
  return std::min(1.0, static_cast<double>(hits) / static_cast<double>(count));
}

}  // namespace

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    raise(ErrorCode::DimensionMismatch, "paired samples must have equal length");
  }
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    raise(ErrorCode::AllZeroDifferences, "all paired differences are zero");
  }
  const std::size_t n = diffs.size();

  // rank |d| with average ranks on ties, in doubled units to stay integral
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  std::vector<long long> ranks2(n, 0);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end + 1 < n && std::abs(diffs[order[end + 1]]) == std::abs(diffs[order[pos]])) ++end;
    // doubled average rank of positions pos..end (1-based ranks)
    const long long rank2 = static_cast<long long>(pos + 1 + end + 1);
    for (std::size_t k = pos; k <= end; ++k) ranks2[order[k]] = rank2;
    pos = end + 1;
  }

  long long w2_plus = 0, w2_minus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) w2_plus += ranks2[i];
    else w2_minus += ranks2[i];
  }
  const long long w2 = std::min(w2_plus, w2_minus);

  TestResult result;
  result.statistic = static_cast<double>(w2) / 2.0;
  result.n_effective = static_cast<int>(n);

  if (n <= 12) {
    result.p_value = wilcoxon_exact_p(ranks2, w2);
    return result;
  }

  // normal approximation with tie-corrected variance, continuity-corrected
  const double dn = static_cast<double>(n);
  const double mean = dn * (dn + 1.0) / 4.0;
  double tie_term = 0.0;
  pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end + 1 < n && std::abs(diffs[order[end + 1]]) == std::abs(diffs[order[pos]])) ++end;
    const double t = static_cast<double>(end - pos + 1);
    tie_term += t * t * t - t;
    pos = end + 1;
  }
  const double variance = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double w = result.statistic;
  const double z = (w - mean + 0.5) / std::sqrt(variance);
  result.p_value = std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
  return result;
}

std::vector<bool> bonferroni(std::span<const double> p_values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  const double threshold = alpha / static_cast<double>(std::max<std::size_t>(1, p_values.size()));
  std::vector<bool> flags(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) flags[i] = p_values[i] < threshold;
  return flags;
}

namespace {

/// k-th unordered pair (i < j) of n items, pairs ordered row by row.
std::pair<std::size_t, std::size_t> pair_from_index(std::size_t k, std::size_t n) {
  std::size_t i = 0;
  std::size_t row = n - 1;  // pairs in row i
  while (k >= row) {
    k -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + k};
}

}  // namespace

AuditReport audit_feature_distributions(std::span<const double> data, std::size_t rows,
                                        std::size_t cols, const AuditConfig& config) {
  if (cols < 2) raise(ErrorCode::InvalidArgument, "audit needs at least 2 feature columns");
  if (rows < 8) raise(ErrorCode::InvalidArgument, "audit needs at least 8 rows");
  if (data.size() != rows * cols) {
    raise(ErrorCode::DimensionMismatch, "data size does not match rows x cols");
  }
  if (config.num_pairs <= 0) raise(ErrorCode::InvalidArgument, "num_pairs must be positive");
  for (double a : config.alphas) {
    if (!(a > 0.0 && a < 1.0)) raise(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }

  const std::size_t pool = cols * (cols - 1) / 2;
  const std::size_t wanted = static_cast<std::size_t>(config.num_pairs);
  std::vector<std::size_t> pair_ids;
  pair_ids.reserve(wanted);
  Rng rng(mix_seed(config.seed, 0xA0D17ULL));
  if (wanted >= pool) {
    for (std::size_t k = 0; k < pool; ++k) pair_ids.push_back(k);
    for (std::size_t k = pool; k < wanted; ++k) pair_ids.push_back(rng.next_below(pool));
  } else {
    // Floyd's sampling: `wanted` distinct pair ids without replacement
    std::set<std::size_t> seen;
    for (std::size_t j = pool - wanted; j < pool; ++j) {
      const std::size_t t = rng.next_below(j + 1);
      if (seen.insert(t).second) {
        pair_ids.push_back(t);
      } else {
        seen.insert(j);
        pair_ids.push_back(j);
      }
    }
  }

  std::vector<double> p_values(pair_ids.size(), -1.0);  // -1 marks a failed test
  parallel_for(pair_ids.size(), config.threads, [&](std::size_t idx) {
    const auto [ci, cj] = pair_from_index(pair_ids[idx], cols);
    std::vector<double> a(rows), b(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      a[r] = data[r * cols + ci];
      b[r] = data[r * cols + cj];
    }
    try {
      const TestResult t = config.test == PairedTest::KolmogorovSmirnov
                               ? ks_two_sample(a, b)
                               : wilcoxon_signed_rank(a, b);
      p_values[idx] = t.p_value;
    } catch (const Error&) {
      p_values[idx] = -1.0;
    }
  });

  AuditReport report;
  report.num_pairs = static_cast<int>(pair_ids.size());
  report.alpha_levels = config.alphas;
  report.seed = config.seed;

  std::vector<double> ok;
  ok.reserve(p_values.size());
  for (double p : p_values) {
    if (p < 0.0) ++report.failed_tests;
    else ok.push_back(p);
  }
  for (double alpha : config.alphas) {
    const double threshold = alpha / static_cast<double>(report.num_pairs);
    std::size_t significant = 0;
    for (double p : ok) {
      if (p < threshold) ++significant;
    }
    report.percent_significant.push_back(100.0 * static_cast<double>(significant) /
                                         static_cast<double>(report.num_pairs));
  }
  if (!ok.empty()) {
    std::sort(ok.begin(), ok.end());
    const std::size_t mid = ok.size() / 2;
    report.median_p = ok.size() % 2 == 1 ? ok[mid] : 0.5 * (ok[mid - 1] + ok[mid]);
  }
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  nlohmann::json j;
  j["num_pairs"] = report.num_pairs;
  j["alpha_levels"] = report.alpha_levels;
  j["percent_significant"] = report.percent_significant;
  j["median_p"] = report.median_p;
  j["seed"] = report.seed;
  j["failed_tests"] = report.failed_tests;
  return j.dump(2) + "\n";
}

std::string audit_to_csv(const AuditReport& report) {
  std::string out = "alpha,percent_significant\n";
  char buffer[64];
  for (std::size_t i = 0; i < report.alpha_levels.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g,%.17g\n", report.alpha_levels[i],
                  report.percent_significant[i]);
    out += buffer;
  }
  return out;
}

}  // namespace pbr
