#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qfso/mie.hpp"

using qfso::mie::MieEfficiencies;
using qfso::mie::RefractiveIndex;
using qfso::mie::mie_efficiencies;
using qfso::mie::size_parameter;

TEST_CASE("size parameter is pi d over lambda") {
  CHECK(size_parameter(1550e-9, 1550e-9) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(size_parameter(12e-6, 1550e-9) == doctest::Approx(24.3220076).epsilon(1e-6));
  CHECK(size_parameter(130e-6, 800e-9) == doctest::Approx(510.50881).epsilon(1e-6));
  CHECK_THROWS_AS(size_parameter(0.0, 1550e-9), std::invalid_argument);
  CHECK_THROWS_AS(size_parameter(1e-6, -1.0), std::invalid_argument);
}

TEST_CASE("known efficiencies from a high-precision reference") {
  // Values frozen from a 40-digit arbitrary-precision evaluation of the
  // same series.
  SUBCASE("absorbing sphere m = 1.5 + 0.01i, x = 5") {
    const MieEfficiencies q = mie_efficiencies({1.5, 0.01}, 5.0);
    CHECK(q.q_ext == doctest::Approx(3.81831877859537).epsilon(1e-10));
    CHECK(q.q_sca == doctest::Approx(3.55435461613979).epsilon(1e-10));
    CHECK(q.q_abs == doctest::Approx(0.263964162455583).epsilon(1e-8));
  }
  SUBCASE("dielectric sphere m = 1.5, x = 50") {
    // Truncating at the Wiscombe order leaves a ~1e-7 series tail for a
    // resonance-rich dielectric this large, hence the looser tolerance.
    const MieEfficiencies q = mie_efficiencies({1.5, 0.0}, 50.0);
    CHECK(q.q_ext == doctest::Approx(2.17107271290014).epsilon(1e-6));
  }
  SUBCASE("water droplet m = 1.33 + 1e-4i at the 12 um / 1550 nm size") {
    const MieEfficiencies q = mie_efficiencies({1.33, 1e-4}, 24.322706);
    CHECK(q.q_ext == doctest::Approx(2.33029015645347).epsilon(1e-10));
  }
  SUBCASE("deep Rayleigh regime m = 1.5, x = 0.01") {
    const MieEfficiencies q = mie_efficiencies({1.5, 0.0}, 0.01);
    CHECK(q.q_ext == doctest::Approx(2.30682135590885e-9).epsilon(1e-8));
  }
}

TEST_CASE("energy balance q_ext = q_sca + q_abs on a broad grid") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> re_m(1.1, 2.0);
  std::uniform_real_distribution<double> im_m(0.0, 0.5);
  std::uniform_real_distribution<double> log_x(std::log(0.01), std::log(200.0));
  for (int i = 0; i < 1000; ++i) {
    const RefractiveIndex m{re_m(rng), im_m(rng)};
    const double x = std::exp(log_x(rng));
    const MieEfficiencies q = mie_efficiencies(m, x);
    CHECK(std::abs(q.q_ext - (q.q_sca + q.q_abs)) <= 1e-9 * std::abs(q.q_ext));
    CHECK(q.q_ext > 0.0);
    CHECK(q.q_sca >= 0.0);
  }
}

TEST_CASE("Rayleigh limit at x = 0.01 within one percent") {
  for (const RefractiveIndex m : {RefractiveIndex{1.33, 0.0}, RefractiveIndex{1.5, 0.0},
                                  RefractiveIndex{1.55, 0.0}}) {
    const double x = 0.01;
    const MieEfficiencies q = mie_efficiencies(m, x);
    const double expected = oracle::rayleigh_q_sca(m, x);
    CHECK(q.q_sca == doctest::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("geometric-optics limit approaches 2") {
  const MieEfficiencies q = mie_efficiencies({1.5, 0.0}, 1000.0);
  CHECK(q.q_ext > 1.9);
  CHECK(q.q_ext < 2.1);
}

TEST_CASE("agreement with the brute-force series oracle for x <= 50") {
  const RefractiveIndex cases_m[] = {{1.33, 0.0}, {1.33, 1e-4}, {1.5, 0.01},
                                     {1.55, 0.005}, {1.7, 0.3}};
  const double cases_x[] = {0.05, 0.5, 1.0, 3.7, 10.0, 24.322706, 50.0};
  for (const auto& m : cases_m) {
    for (double x : cases_x) {
      const MieEfficiencies fast = mie_efficiencies(m, x);
      const MieEfficiencies slow = oracle::mie_brute_force(m, x);
      CHECK(fast.q_ext == doctest::Approx(slow.q_ext).epsilon(1e-6));
      CHECK(fast.q_sca == doctest::Approx(slow.q_sca).epsilon(1e-6));
    }
  }
}

TEST_CASE("repeat calls are bit-identical") {
  const MieEfficiencies a = mie_efficiencies({1.55, 0.005}, 510.50881);
  const MieEfficiencies b = mie_efficiencies({1.55, 0.005}, 510.50881);
  CHECK(a.q_ext == b.q_ext);
  CHECK(a.q_sca == b.q_sca);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(mie_efficiencies({1.5, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mie_efficiencies({1.5, 0.0}, -3.0), std::invalid_argument);
  CHECK_THROWS_AS(mie_efficiencies({-1.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mie_efficiencies({1.5, -0.1}, 1.0), std::invalid_argument);
}
