#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qfso/tomography.hpp"

using namespace qfso::quantum;

TEST_CASE("born probabilities of reference states") {
  const DensityMatrix<double> singlet = singlet_state<double>();

  SUBCASE("singlet is anticorrelated in every matched basis") {
    for (Basis b : kBases) {
      const auto p = born_probabilities(singlet, b, b);
      CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(p[3] == doctest::Approx(0.0).epsilon(1e-14));
    }
  }

  SUBCASE("singlet in crossed bases is flat") {
    const auto p = born_probabilities(singlet, Basis::x, Basis::y);
    for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("maximally mixed state is flat everywhere") {
    const DensityMatrix<double> mixed = 0.25 * DensityMatrix<double>::Identity();
    for (Basis k : kBases) {
      for (Basis l : kBases) {
        for (double v : born_probabilities(mixed, k, l)) {
          CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
        }
      }
    }
  }

  SUBCASE("probabilities stay normalized for random states") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Vector<double, kParamCount> v;
      for (int i = 0; i < kParamCount; ++i) v[i] = unit(rng) * param_upper_bound<double>(i);
      const DensityMatrix<double> rho = density_matrix(from_vector(v));
      for (Basis k : kBases) {
        for (Basis l : kBases) {
          const auto p = born_probabilities(rho, k, l);
          CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0).epsilon(1e-12));
          for (double x : p) CHECK(x >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("single basis likelihood limits") {
  const std::array<double, 4> p = {0.1, 0.2, 0.3, 0.4};

  SUBCASE("one transmitted photon") {
    BasisCounts counts;
    counts.herald0 = 1;
    counts.c00 = 1;
    CHECK(single_basis_log_likelihood(counts, p, 1.0) ==
          doctest::Approx(std::log(0.1)).epsilon(1e-14));
  }

  SUBCASE("a coincidence is impossible through a dead channel") {
    BasisCounts counts;
    counts.herald0 = 2;
    counts.c01 = 1;
    CHECK(single_basis_log_likelihood(counts, p, 0.0) ==
          -std::numeric_limits<double>::infinity());
  }

  SUBCASE("empty counts carry no information") {
    CHECK(single_basis_log_likelihood(BasisCounts{}, p, 0.3) == 0.0);
  }

  SUBCASE("zero-probability outcome with a count is -infinity") {
    const std::array<double, 4> singlet_p = {0.0, 0.5, 0.5, 0.0};
    BasisCounts counts;
    counts.herald0 = 1;
    counts.c00 = 1;
    CHECK(single_basis_log_likelihood(counts, singlet_p, 0.5) ==
          -std::numeric_limits<double>::infinity());
  }

  SUBCASE("validation") {
    BasisCounts bad;
    bad.herald0 = 1;
    bad.c00 = 2;
    CHECK_THROWS_AS(single_basis_log_likelihood(bad, p, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(single_basis_log_likelihood(BasisCounts{}, p, 1.5), std::invalid_argument);
  }
}

TEST_CASE("attenuation factor separates from the state factor") {
  BasisCounts counts;
  counts.herald0 = 6;
  counts.herald1 = 4;
  counts.c00 = 2;
  counts.c01 = 1;
  counts.c10 = 1;
  counts.c11 = 2;
  const std::array<double, 4> p1 = {0.1, 0.2, 0.3, 0.4};
  const std::array<double, 4> p2 = {0.4, 0.3, 0.2, 0.1};
  // The alpha dependence must be a pure additive term independent of p.
  const double shift1 =
      single_basis_log_likelihood(counts, p1, 0.8) - single_basis_log_likelihood(counts, p1, 0.3);
  const double shift2 =
      single_basis_log_likelihood(counts, p2, 0.8) - single_basis_log_likelihood(counts, p2, 0.3);
  CHECK(shift1 == doctest::Approx(shift2).epsilon(1e-14));
}

TEST_CASE("single basis likelihood against exhaustive history enumeration") {
  SUBCASE("ten pairs, generic probabilities") {
    BasisCounts counts;
    counts.herald0 = 6;
    counts.herald1 = 4;
    counts.c00 = 1;
    counts.c01 = 2;
    counts.c10 = 1;
    counts.c11 = 1;
    const std::array<double, 4> p = {0.1, 0.2, 0.3, 0.4};
    const double alpha = 0.5;
    const double fast = single_basis_log_likelihood(counts, p, alpha);
    const double slow = oracle::tree_log_likelihood(counts.herald0, counts.herald1, counts.c00,
                                                    counts.c01, counts.c10, counts.c11, p, alpha);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }

  SUBCASE("ten pairs, singlet probabilities with zero cells") {
    BasisCounts counts;
    counts.herald0 = 5;
    counts.herald1 = 5;
    counts.c01 = 3;
    counts.c10 = 2;
    const std::array<double, 4> p = {0.0, 0.5, 0.5, 0.0};
    const double alpha = 0.7;
    const double fast = single_basis_log_likelihood(counts, p, alpha);
    const double slow = oracle::tree_log_likelihood(counts.herald0, counts.herald1, counts.c00,
                                                    counts.c01, counts.c10, counts.c11, p, alpha);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("full likelihood is the sum over bases and matches the oracle at four pairs") {
  // A fixed, representative parameter point (not a special state).
  Eigen::Vector<double, kParamCount> v;
  v << 1.1, 0.7, 0.4, 0.3, 0.9, 1.2, 0.2, 0.8, 1.0, 0.5, 3.1, 2.2, 4.0, 0.7, 5.5;
  const StateParams<double> params = from_vector(v);
  const DensityMatrix<double> rho = density_matrix(params);
  const double alpha = 0.65;

  // Four pairs per basis with a mix of coincidences and losses.
  MeasurementDataset data;
  std::mt19937_64 rng(99);
  for (auto& counts : data.bases) {
    counts.herald0 = 2 + static_cast<std::uint64_t>(rng() % 2);  // 2 or 3
    counts.herald1 = 4 - counts.herald0;
    counts.c00 = rng() % 2;
    counts.c01 = counts.herald0 - counts.c00 > 0 ? rng() % 2 : 0;
    counts.c10 = counts.herald1 > 0 ? rng() % 2 : 0;
    counts.c11 = counts.herald1 - counts.c10 > 0 ? rng() % 2 : 0;
  }
  validate(data);

  const auto probabilities = all_basis_probabilities(rho);
  double oracle_total = 0.0;
  double sum_of_singles = 0.0;
  for (Basis k : kBases) {
    for (Basis l : kBases) {
      const auto idx = static_cast<std::size_t>(basis_pair_index(k, l));
      const BasisCounts& counts = data.bases[idx];
      oracle_total +=
          oracle::tree_log_likelihood(counts.herald0, counts.herald1, counts.c00, counts.c01,
                                      counts.c10, counts.c11, probabilities[idx], alpha);
      sum_of_singles += single_basis_log_likelihood(counts, probabilities[idx], alpha);
    }
  }
  const double fast = full_log_likelihood(data, params, alpha);
  CHECK(fast == doctest::Approx(sum_of_singles).epsilon(1e-12));
  CHECK(fast == doctest::Approx(oracle_total).epsilon(1e-10));
}
