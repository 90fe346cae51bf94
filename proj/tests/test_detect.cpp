#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rcm/detect.hpp"
#include "rcm/errors.hpp"
#include "rcm/oracle.hpp"
#include "test_support.hpp"

using namespace rcm;
using cd = std::complex<double>;
using test::random_data;
using test::random_matrix;

namespace {

DataSet empty_primaries(RngStream& rng) {
  return {ComplexMatrix::Zero(8, 16), ComplexMatrix::Zero(8, 16), random_matrix(rng, 8, 12)};
}

// R R^H = I with K = 12: identity columns padded by zero columns.
ComplexMatrix identity_training() {
  ComplexMatrix r = ComplexMatrix::Zero(8, 12);
  r.leftCols(8) = ComplexMatrix::Identity(8, 8);
  return r;
}

}  // namespace

TEST_CASE("detector names") {
  for (DetectorKind k : kAllDetectors) CHECK(parse_detector_kind(to_string(k)) == k);
  CHECK(to_string(DetectorKind::MTSA1) == "mtsa1");
  CHECK_THROWS_AS(parse_detector_kind("glrt"), ConfigError);
}

TEST_CASE("empty primaries") {
  RngStream rng(1, 0);
  const ComplexVector v = steering_vector(0.1, 8);
  const DataSet d = empty_primaries(rng);
  CHECK(gamf_statistic(d, v) == 0.0);
  CHECK(detect(DetectorKind::GAMF, d, v).statistic == 0.0);
  CHECK(tsa_statistic(d, {10, 6}, v) == 0.0);
  CHECK(m_tsa_statistic(d, {10, 6}, v) == 0.0);
  CHECK(clairvoyant_statistic(d, {10, 6}, HermitianMatrix::Identity(8, 8), v) == 0.0);

  const auto [osa1, at1] = osa1_statistic(d, v);
  CHECK(osa1 == doctest::Approx(-0.5199).epsilon(1e-4));
  CHECK(at1 == HypothesisIndex{1, 0});

  const auto [osa2, at2] = osa2_statistic(d, v);
  CHECK(osa2 == doctest::Approx(-4.918).epsilon(1e-4));
  CHECK(at2 == HypothesisIndex{1, 0});

  CHECK_THROWS_AS(gasd_statistic(d, v), ZeroColumn);
}

TEST_CASE("unit-whitened steering columns") {
  const ComplexVector v = steering_vector(0.1, 8);
  DataSet d{ComplexMatrix::Zero(8, 16), ComplexMatrix::Zero(8, 16), identity_training()};
  d.z1.col(0) = v;
  CHECK(tsa_statistic(d, {1, 0}, v) == doctest::Approx(8.0).epsilon(1e-13));

  d.z1.colwise() = v;
  d.z2.colwise() = v;
  const auto [osa1, at] = osa1_statistic(d, v);
  CHECK(osa1 == doctest::Approx(16 * (8 - std::log(512.0) / 12)).epsilon(1e-12));
  CHECK(osa1 == doctest::Approx(119.68).epsilon(1e-4));
  CHECK(at.signal_pulses() == 16);

  DataSet single{ComplexMatrix::Zero(8, 16), ComplexMatrix::Zero(8, 16), identity_training()};
  single.z1.col(0) = v;
  CHECK(clairvoyant_statistic(single, {1, 0}, HermitianMatrix::Identity(8, 8), v) ==
        doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("GASD terms are scale free and bounded") {
  RngStream rng(2, 0);
  const ComplexVector v = steering_vector(0.1, 8);
  DataSet d = random_data(rng, 8, 16, 12);
  const HermitianMatrix s = sample_scatter(d.r);
  auto term = [&](const ComplexVector& z) {
    return oracle::whitened_energy(z, s, v) / quad_form(factorize(s), z, z).real();
  };
  double rest = 0;
  for (int g = 1; g < 16; ++g) rest += term(d.z1.col(g));
  for (int g = 0; g < 16; ++g) rest += term(d.z2.col(g));
  for (cd c : {cd(1, 0), cd(-3, 2), cd(0, 1e-3)}) {
    d.z1.col(0) = c * v;
    CHECK(gasd_statistic(d, v) == doctest::Approx(1.0 + rest).epsilon(1e-12));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const DataSet x = random_data(rng, 8, 16, 12);
    const double g = gasd_statistic(x, v);
    CHECK(g >= 0.0);
    CHECK(g <= 32.0);
  }
}

TEST_CASE("M-TSA-1 survives training sets smaller than the array") {
  RngStream rng(3, 0);
  const ComplexVector v = steering_vector(0.1, 8);
  const DataSet d = random_data(rng, 8, 16, 4);
  CHECK_THROWS_AS(tsa_statistic(d, {1, 0}, v), NotPositiveDefinite);
  CHECK(std::isfinite(m_tsa_statistic(d, {1, 0}, v)));
  CHECK(m_tsa_statistic(d, {1, 0}, v) >= 0.0);
}

TEST_CASE("GAMF dominates the cell-restricted energies") {
  RngStream rng(4, 0);
  const ComplexVector v = steering_vector(0.1, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const DataSet d = random_data(rng, 8, 16, 12);
    const double gamf = gamf_statistic(d, v);
    HypothesisGrid(16).for_each([&](HypothesisIndex idx) { CHECK(gamf >= tsa_statistic(d, idx, v)); });
  }
}

TEST_CASE("statistics match the definition-literal oracle") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int na = 1 + static_cast<int>(rng.next_u32() % 4);
    const int np = 1 + static_cast<int>(rng.next_u32() % 5);
    const int k = na + 2 + static_cast<int>(rng.next_u32() % 4);
    const oracle::Instance inst = oracle::random_instance(rng, na, np, k);
    const ClairvoyantInputs ci{inst.truth, inst.true_m};
    for (DetectorKind kind : kAllDetectors) {
      INFO(to_string(kind), " na=", na, " np=", np, " k=", k);
      const double got = detect(kind, inst.data, inst.v, &ci).statistic;
      const double expected = oracle::statistic(kind, inst.data, inst.v, &ci);
      CHECK(test::mixed_error(got, expected) < 1e-10);
    }
    CHECK(test::mixed_error(m_tsa_statistic(inst.data, inst.truth, inst.v),
                            oracle::lambda(inst.data, inst.truth,
                                           oracle::augmented_scatter(inst.data, inst.truth), inst.v)) <
          1e-10);
  }
}

TEST_CASE("detector bank agrees with individual calls") {
  Scenario scn;
  scn.sinr_db = 8;
  const SceneGenerator gen(scn);
  const ClairvoyantInputs ci{*scn.true_hypothesis, gen.covariance()};
  const DetectorBank bank({kAllDetectors.begin(), kAllDetectors.end()}, gen.steering(), ci);
  for (int t = 0; t < 10; ++t) {
    RngStream rng(6, t);
    const DataSet d = gen(rng);
    const auto reports = bank.evaluate(d);
    REQUIRE(reports.size() == kAllDetectors.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const DetectorReport single = detect(kAllDetectors[i], d, gen.steering(), &ci);
      CHECK(reports[i].kind == kAllDetectors[i]);
      CHECK(test::mixed_error(reports[i].statistic, single.statistic) < 1e-10);
      CHECK(reports[i].estimated == single.estimated);
    }
  }
}

TEST_CASE("clairvoyant requires its inputs") {
  RngStream rng(7, 0);
  const DataSet d = random_data(rng, 8, 16, 12);
  CHECK_THROWS_AS(detect(DetectorKind::CLAIRVOYANT, d, steering_vector(0.1, 8)), MissingClairvoyantInputs);
  CHECK_THROWS_AS(DetectorBank({DetectorKind::CLAIRVOYANT}, steering_vector(0.1, 8)),
                  MissingClairvoyantInputs);
}

TEST_CASE("statistics are invariant to a common complex scaling") {
  RngStream rng(8, 0);
  const ComplexVector v = steering_vector(0.1, 8);
  for (cd c : {cd(1e-3, 0), cd(0, 5), cd(-30, 30)}) {
    const DataSet d = random_data(rng, 8, 16, 12);
    const DataSet s{c * d.z1, c * d.z2, c * d.r};
    for (DetectorKind kind : kAllDetectors) {
      if (kind == DetectorKind::CLAIRVOYANT) continue;
      INFO(to_string(kind));
      const double a = detect(kind, d, v).statistic;
      const double b = detect(kind, s, v).statistic;
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("signal shifts every statistic upward in distribution") {
  Scenario scn;
  scn.sinr_db = 15;
  const SceneGenerator signal(scn), null(scn, false);
  const ClairvoyantInputs ci{*scn.true_hypothesis, signal.covariance()};
  const DetectorBank bank({kAllDetectors.begin(), kAllDetectors.end()}, signal.steering(), ci);
  const int n = 10000;
  std::vector<std::vector<double>> h0(kAllDetectors.size()), h1(kAllDetectors.size());
  for (int t = 0; t < n; ++t) {
    RngStream a(9, t), b(9, t);
    const auto r0 = bank.evaluate(null(a));
    const auto r1 = bank.evaluate(signal(b));
    for (std::size_t i = 0; i < kAllDetectors.size(); ++i) {
      h0[i].push_back(r0[i].statistic);
      h1[i].push_back(r1[i].statistic);
    }
  }
  for (std::size_t i = 0; i < kAllDetectors.size(); ++i) {
    INFO(to_string(kAllDetectors[i]));
    std::sort(h0[i].begin(), h0[i].end());
    std::sort(h1[i].begin(), h1[i].end());
    // Empirical CDF of H1 never above that of H0, i.e. every quantile is higher.
    int violations = 0;
    for (int q = 0; q < n; ++q) violations += h1[i][q] < h0[i][q];
    CHECK(violations == 0);
  }
}
