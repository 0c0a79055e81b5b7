#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pbr {

/// Outcome of a two-sample test. p_value is two-sided.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n_effective = 0;
};

/// Two-sample Kolmogorov-Smirnov test. The statistic is the exact sup of
/// |F_x - F_y| over the pooled data points (right-continuous empirical CDFs);
/// the p-value uses the asymptotic Kolmogorov distribution at effective size
/// n m / (n + m), series truncated below 1e-16. Errors: EmptySample.
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped; |d| ranked with average ranks on ties; W = min(W+, W-). Exact
/// sign-flip enumeration when the effective n <= 12, otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
/// Errors: DimensionMismatch, AllZeroDifferences.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

/// flag[i] = (p[i] < alpha / m) with m = p.size(). Errors: InvalidArgument
/// unless alpha is inside (0, 1).
std::vector<bool> bonferroni(std::span<const double> p_values, double alpha);

enum class PairedTest { KolmogorovSmirnov, Wilcoxon };

struct AuditConfig {
  int num_pairs = 200000;
  std::vector<double> alphas = {0.05, 0.005, 0.001};
  PairedTest test = PairedTest::KolmogorovSmirnov;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Column-pair distribution audit over an M x N feature matrix.
struct AuditReport {
  int num_pairs = 0;
  std::vector<double> alpha_levels;
  std::vector<double> percent_significant;  // one entry per alpha level
  double median_p = 1.0;
  std::uint64_t seed = 0;
  int failed_tests = 0;  // per-pair test errors, counted as non-significant
};

/// Samples num_pairs unordered column pairs (distinct until the pool is
/// exhausted, then with replacement), tests each pair of columns with the
/// chosen test, and applies Bonferroni with m = num_pairs at every alpha.
/// data is row-major with `rows` observations of `cols` feature elements.
/// Errors: InvalidArgument when cols < 2 or rows < 8.
AuditReport audit_feature_distributions(std::span<const double> data, std::size_t rows,
                                        std::size_t cols, const AuditConfig& config);

std::string audit_to_json(const AuditReport& report);
std::string audit_to_csv(const AuditReport& report);

}  // namespace pbr
