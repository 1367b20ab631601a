#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <set>

#include "spinbath/bath.hpp"

using namespace spinbath;

TEST_CASE("Ohmic sampling hits the cutoff uniformly") {
  const double gamma = 1.4839780981595093e-05;  // 1/(1630 fs)
  const BathSpec b = sample_ohmic_bath(60, 2.9e-3, gamma, 1e5);
  CHECK(b.delta_omega == Catch::Approx(4.8333333333333327e-05).epsilon(1e-14));
  CHECK(b.omega.front() == Catch::Approx(b.delta_omega).epsilon(1e-14));
  CHECK(b.omega.back() == Catch::Approx(2.9e-3).epsilon(1e-14));
  CHECK(b.lambda.front() ==
        Catch::Approx(5.8879009194754323e-05).epsilon(1e-12));
  CHECK(b.recurrence_time() ==
        Catch::Approx(129996.93738992247).epsilon(1e-12));
  CHECK(au_to_fs(b.recurrence_time()) ==
        Catch::Approx(3144.4755090056647).epsilon(1e-12));
}

TEST_CASE("coupling-weight sum is a discretization invariant") {
  const double gamma = 1.4839780981595093e-05;
  const double target = 1e5 * gamma * 2.9e-3;
  for (const int n : {15, 30, 45, 60}) {
    const BathSpec b = sample_ohmic_bath(n, 2.9e-3, gamma, 1e5);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += b.lambda[j] * b.lambda[j] / b.omega[j];
    CHECK(sum == Catch::Approx(target).epsilon(1e-12));
  }
}

TEST_CASE("halving the mode count strengthens each coupling by sqrt(2)") {
  const double gamma = 1.4839780981595093e-05;
  const BathSpec b60 = sample_ohmic_bath(60, 2.9e-3, gamma, 1e5);
  const BathSpec b30 = sample_ohmic_bath(30, 2.9e-3, gamma, 1e5);
  // Mode 10 of the fine bath shares its frequency with mode 5 of the coarse.
  REQUIRE(b60.omega[9] == Catch::Approx(b30.omega[4]).epsilon(1e-14));
  CHECK(b30.lambda[4] / b60.lambda[9] ==
        Catch::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("interval-center sampling stays inside the band") {
  const BathSpec b = sample_ohmic_bath(10, 2.9e-3, 1e-5, 1e5, 0.0,
                                       BathSampling::centers);
  CHECK(b.omega.front() == Catch::Approx(0.5 * b.delta_omega).epsilon(1e-14));
  CHECK(b.omega.back() ==
        Catch::Approx(2.9e-3 - 0.5 * b.delta_omega).epsilon(1e-13));
}

TEST_CASE("bath sampling rejects bad input") {
  CHECK_THROWS_AS(sample_ohmic_bath(0, 2.9e-3, 1e-5, 1e5),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_ohmic_bath(64, 2.9e-3, 1e-5, 1e5),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_ohmic_bath(10, -1.0, 1e-5, 1e5),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_ohmic_bath(10, 2.9e-3, -1e-5, 1e5),
                  std::invalid_argument);
  CHECK_NOTHROW(sample_ohmic_bath(10, 2.9e-3, 0.0, 1e5));
}

TEST_CASE("configuration space dimensions") {
  for (int n = 1; n <= 12; ++n) {
    for (int k = 0; k <= n; ++k) {
      const ConfigurationSpace s = build_configuration_space(n, k);
      std::size_t expect = 0;
      for (int pc = 0; pc <= k; ++pc)
        expect += binomial(static_cast<unsigned>(n),
                           static_cast<unsigned>(pc));
      CHECK(s.dim() == expect);
    }
    CHECK(build_configuration_space(n, n).dim() == (std::size_t{1} << n));
  }
  CHECK_THROWS_AS(build_configuration_space(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_configuration_space(4, -1), std::invalid_argument);
  CHECK_THROWS_AS(build_configuration_space(0, 0), std::invalid_argument);
}

TEST_CASE("rank order is popcount-major, value-minor") {
  const ConfigurationSpace s = build_configuration_space(4, 2);
  REQUIRE(s.dim() == 11);
  CHECK(s.rank_of(0b0000) == 0);
  CHECK(s.rank_of(0b0001) == 1);
  CHECK(s.rank_of(0b1000) == 4);
  CHECK(s.rank_of(0b0011) == 5);
  CHECK(s.masks[5] == 0b0011);
  CHECK(s.masks[10] == 0b1100);
  CHECK_THROWS_AS(s.rank_of(0b0111), std::invalid_argument);
  CHECK_THROWS_AS(s.rank_of(std::uint64_t{1} << 10), std::invalid_argument);
}

TEST_CASE("rank and unrank are inverse and ordered") {
  const ConfigurationSpace s = build_configuration_space(12, 4);
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < s.dim(); ++r) {
    const std::uint64_t m = s.masks[r];
    CHECK(s.rank_of(m) == r);
    CHECK(seen.insert(m).second);
    if (r + 1 < s.dim()) {
      const std::uint64_t next = s.masks[r + 1];
      const int pc = std::popcount(m), pn = std::popcount(next);
      CHECK((pn > pc || (pn == pc && next > m)));
    }
  }
}

TEST_CASE("flip neighbors respect the excitation cap") {
  const ConfigurationSpace s = build_configuration_space(4, 2);
  const std::size_t r = s.rank_of(0b0011);
  const auto nbrs = neighbors_under_flip(s, r);
  // Both occupied modes can relax; no third excitation fits.
  REQUIRE(nbrs.size() == 2);
  CHECK(nbrs[0].first == 0);
  CHECK(nbrs[0].second == s.rank_of(0b0010));
  CHECK(nbrs[1].first == 1);
  CHECK(nbrs[1].second == s.rank_of(0b0001));

  const auto from_vacuum = neighbors_under_flip(s, 0);
  REQUIRE(from_vacuum.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(from_vacuum[static_cast<std::size_t>(j)].first == j);
    CHECK(from_vacuum[static_cast<std::size_t>(j)].second ==
          s.rank_of(std::uint64_t{1} << j));
  }

  const ConfigurationSpace untruncated = build_configuration_space(4, 4);
  CHECK(neighbors_under_flip(untruncated, untruncated.rank_of(0b0011)).size() ==
        4);
  CHECK_THROWS_AS(neighbors_under_flip(s, s.dim()), std::invalid_argument);
}
