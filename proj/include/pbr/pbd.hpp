#pragma once

#include <span>
#include <vector>

namespace pbr {

/// Exact Poisson-Binomial pmf over n = 0..N successes for independent trials
/// with probabilities p, computed by folding each Bernoulli into the running
/// pmf (O(N^2)). Errors: ProbabilityOutOfRange.
std::vector<double> pb_pmf(std::span<const double> p);

struct PbMoments {
  double mu = 0.0;      // sum p_i
  double sigma2 = 0.0;  // sum p_i (1 - p_i)
};

PbMoments pb_moments(std::span<const double> p);

/// Total-variation-style comparison of the Poisson-Binomial law against the
/// Poisson(lambda = sum p_i) approximation, with the bound 2 sum p_i^2.
/// The Poisson tail is truncated once its cumulative mass exceeds 1 - 1e-12.
struct LeCamResult {
  double tv_distance = 0.0;
  double bound = 0.0;
  bool holds = false;  // tv_distance < bound
};

LeCamResult lecam_check(std::span<const double> p);

}  // namespace pbr
