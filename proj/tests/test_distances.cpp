#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pbr/dataio.hpp"
#include "pbr/distances.hpp"

using pbr::Error;
using pbr::ErrorCode;
using pbr::evaluate;
using pbr::FeatureVector;
using pbr::InputMode;
using pbr::MeasureId;

namespace {

// expected values computed with a 40-digit evaluation of the per-bin
// definitions, frozen before the implementation was written
constexpr double kMuDE = 0.24773579344;
constexpr double kSigma2DE = 0.207974438151;
constexpr double kMuDF = 0.230734734575;
constexpr double kSigma2DF = 0.213521698614;
constexpr double kPbrDE = 0.0437632314012;
constexpr double kPbrDF = 0.0447703549143;
constexpr double kChi2DE = 0.428796784978;
constexpr double kChi2DF = 0.409590521778;
constexpr double kBdDE = 0.146297470207;
constexpr double kBdDF = 0.132814543235;
constexpr double kHellingerDE = 0.368916412967;
constexpr double kHellingerDF = 0.352664900311;
constexpr double kHiDE = 0.385816048607;
constexpr double kHiDF = 0.359459459459;
constexpr double kL1DE = 0.771632097213;
constexpr double kL1DF = 0.718918918919;
constexpr double kL2DE = 0.441885672377;
constexpr double kL2DF = 0.366313440769;
constexpr double kL1BrdDE = 18.092966851518;
constexpr double kL1BrdDF = 9.6255148206965008;

}  // namespace

TEST_CASE("difference vector on the worked example") {
  const auto [d, e, f] = pbr::toy_fixture();

  const auto de = pbr::difference_vector(d, e);
  CHECK(de.e[4] == doctest::Approx(0.197191926082).epsilon(1e-10));
  CHECK(de.mu == doctest::Approx(kMuDE).epsilon(1e-10));
  CHECK(de.sigma2 == doctest::Approx(kSigma2DE).epsilon(1e-10));

  const auto df = pbr::difference_vector(d, f);
  CHECK(df.mu == doctest::Approx(kMuDF).epsilon(1e-10));
  CHECK(df.sigma2 == doctest::Approx(kSigma2DF).epsilon(1e-10));

  // agreement with the independent long-double oracle
  CHECK(de.mu ==
        doctest::Approx(static_cast<double>(oracle::jd(d.values(), e.values()))).epsilon(1e-13));
  CHECK(de.sigma2 ==
        doctest::Approx(static_cast<double>(oracle::pb_variance(d.values(), e.values())))
            .epsilon(1e-13));
}

TEST_CASE("difference vector identity and limit conventions") {
  const FeatureVector x({0.1, 0.2, 0.3, 0.4}, true);
  const auto dv = pbr::difference_vector(x, x);
  CHECK(dv.mu == 0.0);
  CHECK(dv.sigma2 == 0.0);
  for (double e : dv.e) CHECK(e == 0.0);

  // a_i = 0, b_i = 0.4 contributes 0.4 ln 2 (the a-term vanishes)
  const FeatureVector a({0.0, 1.0}, true);
  const FeatureVector b({0.4, 0.6}, true);
  const auto ab = pbr::difference_vector(a, b);
  CHECK(ab.e[0] == doctest::Approx(0.4 * std::log(2.0)).epsilon(1e-15));

  // a shared empty bin contributes exactly zero
  const FeatureVector p({0.0, 0.5, 0.5}, true);
  const FeatureVector q({0.0, 0.3, 0.7}, true);
  CHECK(pbr::difference_vector(p, q).e[0] == 0.0);
}

TEST_CASE("pbr distance on the worked example") {
  const auto [d, e, f] = pbr::toy_fixture();
  CHECK(pbr::pbr_distance(d, e) == doctest::Approx(kPbrDE).epsilon(1e-9));
  CHECK(pbr::pbr_distance(d, f) == doctest::Approx(kPbrDF).epsilon(1e-9));
  CHECK(pbr::pbr_distance(d, d) == 0.0);
  CHECK(evaluate(MeasureId::PBR, d, e) == pbr::pbr_distance(d, e));
}

TEST_CASE("normalized-mode inputs must carry the flag") {
  const FeatureVector raw({1, 2, 3});
  const FeatureVector norm = pbr::normalize(raw);
  CHECK_THROWS_AS(evaluate(MeasureId::L1, raw, norm), Error);
  CHECK_NOTHROW(evaluate(MeasureId::L1, raw, norm, InputMode::Raw));
}

TEST_CASE("degenerate denominator is only reachable raw") {
  const FeatureVector x = FeatureVector({1000.0, 0.0});
  const FeatureVector y = FeatureVector({0.0, 1000.0});
  try {
    pbr::pbr_distance(x, y, InputMode::Raw);
    FAIL("expected DegenerateDenominator");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateDenominator);
  }
}

TEST_CASE("all comparison measures on the worked example") {
  const auto [d, e, f] = pbr::toy_fixture();
  const auto near = [](double expected) { return doctest::Approx(expected).epsilon(1e-9); };

  CHECK(evaluate(MeasureId::JD, d, e) == near(kMuDE));
  CHECK(evaluate(MeasureId::JD, d, f) == near(kMuDF));
  CHECK(evaluate(MeasureId::CHI2, d, e) == near(kChi2DE));
  CHECK(evaluate(MeasureId::CHI2, d, f) == near(kChi2DF));
  CHECK(evaluate(MeasureId::BD, d, e) == near(kBdDE));
  CHECK(evaluate(MeasureId::BD, d, f) == near(kBdDF));
  CHECK(evaluate(MeasureId::HELLINGER, d, e) == near(kHellingerDE));
  CHECK(evaluate(MeasureId::HELLINGER, d, f) == near(kHellingerDF));
  CHECK(evaluate(MeasureId::HI, d, e) == near(kHiDE));
  CHECK(evaluate(MeasureId::HI, d, f) == near(kHiDF));
  CHECK(evaluate(MeasureId::L1, d, e) == near(kL1DE));
  CHECK(evaluate(MeasureId::L1, d, f) == near(kL1DF));
  CHECK(evaluate(MeasureId::L2, d, e) == near(kL2DE));
  CHECK(evaluate(MeasureId::L2, d, f) == near(kL2DF));
  CHECK(evaluate(MeasureId::L1BRD, d, e) == near(kL1BrdDE));
  CHECK(evaluate(MeasureId::L1BRD, d, f) == near(kL1BrdDF));

  CHECK(evaluate(MeasureId::CHI2, d, e) ==
        doctest::Approx(static_cast<double>(oracle::chi2(d.values(), e.values())))
            .epsilon(1e-13));
}

TEST_CASE("worked-example orderings: pbr disagrees with the field") {
  const auto [d, e, f] = pbr::toy_fixture();
  CHECK(pbr::pbr_distance(d, e) < pbr::pbr_distance(d, f));
  for (MeasureId m : {MeasureId::BD, MeasureId::JD, MeasureId::CHI2, MeasureId::HELLINGER,
                      MeasureId::HI, MeasureId::L1BRD}) {
    CAPTURE(pbr::measure_name(m));
    CHECK(evaluate(m, d, f) < evaluate(m, d, e));
  }
}

TEST_CASE("jd equals the difference-vector mean exactly") {
  pbr::Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dims = 2 + rng.next_below(16);
    const FeatureVector x(oracle::random_histogram(rng, dims), true);
    const FeatureVector y(oracle::random_histogram(rng, dims), true);
    const double jd = evaluate(MeasureId::JD, x, y);
    const double mu = pbr::difference_vector(x, y).mu;
    CHECK(std::abs(jd - mu) <= 1e-15);
  }
}

TEST_CASE("measure axioms on random normalized inputs") {
  pbr::Rng rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t dims = 2 + rng.next_below(10);
    const FeatureVector x(oracle::random_histogram(rng, dims), true);
    const FeatureVector y(oracle::random_histogram(rng, dims), true);
    for (MeasureId m : pbr::kAllMeasures) {
      CAPTURE(pbr::measure_name(m));
      const double dxy = evaluate(m, x, y);
      const double dyx = evaluate(m, y, x);
      if (pbr::is_infinite_distance(dxy)) {
        CHECK(pbr::is_infinite_distance(dyx));
        continue;
      }
      CHECK(dxy >= 0.0);
      CHECK(std::abs(dxy - dyx) <= 1e-12 * std::max(1.0, dxy));
      const double dxx = evaluate(m, x, x);
      CHECK(std::abs(dxx) <= 1e-12);
    }
  }
}

TEST_CASE("difference vector bounds on random normalized inputs") {
  pbr::Rng rng(13);
  const double ln2 = std::log(2.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t dims = 2 + rng.next_below(10);
    const FeatureVector x(oracle::random_histogram(rng, dims), true);
    const FeatureVector y(oracle::random_histogram(rng, dims), true);
    const auto dv = pbr::difference_vector(x, y);
    for (std::size_t i = 0; i < dims; ++i) {
      CHECK(dv.e[i] >= 0.0);
      CHECK(dv.e[i] <= (x[i] + y[i]) * ln2 + 1e-15);
      if (x[i] == y[i]) CHECK(dv.e[i] == 0.0);
    }
    CHECK(dv.mu <= 2.0 * ln2 + 1e-12);
    CHECK(dv.sigma2 >= 0.0);
    CHECK(dv.sigma2 <= dv.mu + 1e-15);
  }
}

TEST_CASE("triangle inequality for the metric members") {
  pbr::Rng rng(17);
  int checked = 0;
  while (checked < 10000) {
    const std::size_t dims = 2 + rng.next_below(8);
    const FeatureVector x(oracle::random_histogram(rng, dims), true);
    const FeatureVector y(oracle::random_histogram(rng, dims), true);
    const FeatureVector z(oracle::random_histogram(rng, dims), true);
    for (MeasureId m : {MeasureId::L1, MeasureId::L2, MeasureId::HELLINGER, MeasureId::HI}) {
      CAPTURE(pbr::measure_name(m));
      const double xz = evaluate(m, x, z);
      const double xy = evaluate(m, x, y);
      const double yz = evaluate(m, y, z);
      CHECK(xz <= xy + yz + 1e-12);
    }
    ++checked;
  }
}

TEST_CASE("pbr semimetric witness violates the triangle inequality") {
  const auto [x, y, z] = pbr::semimetric_witness();
  const double xz = pbr::pbr_distance(x, z);
  const double xy = pbr::pbr_distance(x, y);
  const double yz = pbr::pbr_distance(y, z);
  CHECK(xz == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(xy == doctest::Approx(0.19394192939984287).epsilon(1e-13));
  CHECK(yz == doctest::Approx(0.19394192939984287).epsilon(1e-13));
  CHECK(xz > xy + yz);
  CHECK(xz - (xy + yz) > 0.3);  // comfortable margin, not a numerical fluke
}

TEST_CASE("bd on disjoint supports returns the infinity sentinel") {
  const FeatureVector x({1.0, 0.0}, true);
  const FeatureVector y({0.0, 1.0}, true);
  const double d = evaluate(MeasureId::BD, x, y);
  CHECK(pbr::is_infinite_distance(d));
  CHECK(evaluate(MeasureId::HELLINGER, x, y) == doctest::Approx(1.0));
}

TEST_CASE("measure names parse round-trip") {
  for (MeasureId m : pbr::kAllMeasures) {
    const auto parsed = pbr::parse_measure(pbr::measure_name(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(!pbr::parse_measure("emd").has_value());
}
