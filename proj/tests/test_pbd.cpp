#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pbr/error.hpp"
#include "pbr/pbd.hpp"

using pbr::Error;
using pbr::ErrorCode;

namespace {

double binomial_pmf(int n, int k, double q) {
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(q) + (n - k) * std::log(1.0 - q));
}

}  // namespace

TEST_CASE("pmf hand examples") {
  const std::vector<double> half = {0.5, 0.5, 0.5};
  const auto pmf = pbr::pb_pmf(half);
  REQUIRE(pmf.size() == 4);
  CHECK(pmf[0] == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(pmf[1] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(pmf[2] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(pmf[3] == doctest::Approx(0.125).epsilon(1e-15));

  const std::vector<double> two = {0.1, 0.9};
  const auto pmf2 = pbr::pb_pmf(two);
  CHECK(pmf2[0] == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(pmf2[1] == doctest::Approx(0.82).epsilon(1e-14));
  CHECK(pmf2[2] == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("pmf matches exhaustive subset enumeration") {
  pbr::Rng rng(101);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.next_below(12);
    std::vector<double> p(n);
    for (auto& v : p) v = rng.next_double();
    const auto fast = pbr::pb_pmf(p);
    const auto brute = oracle::pb_pmf_bruteforce(p);
    REQUIRE(fast.size() == brute.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - brute[k]) <= 1e-12);
    }
  }
}

TEST_CASE("pmf reduces to the binomial for equal probabilities") {
  pbr::Rng rng(102);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(40));
    const double q = 0.05 + 0.9 * rng.next_double();
    const std::vector<double> p(n, q);
    const auto pmf = pbr::pb_pmf(p);
    for (int k = 0; k <= n; ++k) {
      CHECK(std::abs(pmf[k] - binomial_pmf(n, k, q)) <= 1e-10);
    }
  }
}

TEST_CASE("pmf sums to one and stays unimodal") {
  pbr::Rng rng(103);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = trial == 0 ? 1000 : 2 + rng.next_below(200);
    std::vector<double> p(n);
    for (auto& v : p) v = rng.next_double();
    const auto pmf = pbr::pb_pmf(p);
    double sum = 0.0;
    for (double v : pmf) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // rises to the mode, then falls: the sign of successive differences
    // changes at most once (tolerating rounding noise)
    int direction = 1;
    for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
      const double diff = pmf[k + 1] - pmf[k];
      if (direction == 1 && diff < -1e-14) direction = -1;
      else if (direction == -1) CHECK(diff <= 1e-14);
    }
  }
}

TEST_CASE("moments") {
  const std::vector<double> quarters(4, 0.5);
  const auto m = pbr::pb_moments(quarters);
  CHECK(m.mu == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m.sigma2 == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> deterministic = {1.0, 0.0};
  const auto md = pbr::pb_moments(deterministic);
  CHECK(md.mu == 1.0);
  CHECK(md.sigma2 == 0.0);
  const auto pmf = pbr::pb_pmf(deterministic);
  CHECK(pmf[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pmf[0] == 0.0);
  CHECK(pmf[2] == 0.0);
}

TEST_CASE("moments agree with the pmf") {
  pbr::Rng rng(104);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 50;
    std::vector<double> p(n);
    for (auto& v : p) v = rng.next_double();
    const auto m = pbr::pb_moments(p);
    const auto pmf = pbr::pb_pmf(p);
    double mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      mean += static_cast<double>(k) * pmf[k];
      second += static_cast<double>(k) * static_cast<double>(k) * pmf[k];
    }
    CHECK(std::abs(mean - m.mu) <= 1e-10);
    CHECK(std::abs(second - mean * mean - m.sigma2) <= 1e-10);
  }
}

TEST_CASE("poisson approximation bound examples") {
  const std::vector<double> small(10, 0.01);
  const auto r = pbr::lecam_check(small);
  CHECK(r.bound == doctest::Approx(0.002).epsilon(1e-15));
  CHECK(r.holds);
  CHECK(r.tv_distance < 0.002);

  const std::vector<double> halves(5, 0.5);
  const auto r2 = pbr::lecam_check(halves);
  CHECK(r2.bound == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r2.holds);
}

TEST_CASE("poisson approximation bound holds on random sweeps") {
  pbr::Rng rng(105);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next_below(30);
    std::vector<double> p(n);
    bool nondegenerate = false;
    for (auto& v : p) {
      v = rng.next_double();
      if (v > 0.0 && v < 1.0) nondegenerate = true;
    }
    if (!nondegenerate) p[0] = 0.5;
    const auto r = pbr::lecam_check(p);
    CHECK(r.holds);
    CHECK(r.tv_distance < r.bound);
  }
}

TEST_CASE("probability validation") {
  CHECK_THROWS_AS(pbr::pb_pmf(std::vector<double>{0.5, 1.5}), Error);
  CHECK_THROWS_AS(pbr::pb_pmf(std::vector<double>{-0.1}), Error);
  CHECK_THROWS_AS(pbr::pb_pmf(std::vector<double>{}), Error);
  try {
    pbr::pb_pmf(std::vector<double>{0.5, 1.5});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProbabilityOutOfRange);
    CHECK(e.index() == 1);
  }
}
