#include "pbr/pbd.hpp"

#include <cmath>
#include <string>

#include "pbr/error.hpp"

namespace pbr {

namespace {

void check_probabilities(std::span<const double> p) {
  if (p.empty()) {
    raise(ErrorCode::InvalidArgument, "need at least one trial probability");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      raise(ErrorCode::ProbabilityOutOfRange,
            "p[" + std::to_string(i) + "] = " + std::to_string(p[i]) + " outside [0, 1]",
            static_cast<long>(i));
    }
  }
}

double poisson_pmf(double lambda, std::size_t n) {
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(n) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(n) + 1.0));
}

}  // namespace

std::vector<double> pb_pmf(std::span<const double> p) {
  check_probabilities(p);
  std::vector<double> pmf(p.size() + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t filled = 0;  // highest reachable success count so far
  for (double pi : p) {
    ++filled;
    for (std::size_t k = filled; k > 0; --k) {
      pmf[k] = pmf[k] * (1.0 - pi) + pmf[k - 1] * pi;
    }
    pmf[0] *= (1.0 - pi);
  }
  return pmf;
}

PbMoments pb_moments(std::span<const double> p) {
  check_probabilities(p);
  PbMoments m;
  for (double pi : p) {
    m.mu += pi;
    m.sigma2 += pi * (1.0 - pi);
  }
  return m;
}

LeCamResult lecam_check(std::span<const double> p) {
  check_probabilities(p);
  const std::vector<double> pmf = pb_pmf(p);
  double lambda = 0.0;
  double bound = 0.0;
  for (double pi : p) {
    lambda += pi;
    bound += 2.0 * pi * pi;
  }

  LeCamResult result;
  result.bound = bound;
  double cumulative_poisson = 0.0;
  for (std::size_t n = 0; n <= pmf.size() + 4096; ++n) {
    const double pois = poisson_pmf(lambda, n);
    const double pb = n < pmf.size() ? pmf[n] : 0.0;
    result.tv_distance += std::abs(pb - pois);
    cumulative_poisson += pois;
    if (n >= pmf.size() - 1 && cumulative_poisson > 1.0 - 1e-12) break;
  }
  result.holds = result.tv_distance < result.bound;
  return result;
}

}  // namespace pbr
