#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "spinbath/grid.hpp"

using namespace spinbath;

TEST_CASE("build_grid spacing and layout") {
  const SpatialGrid g = build_grid(-0.4, 1.2, 8);
  CHECK(g.dr == Catch::Approx(0.2).epsilon(1e-15));
  CHECK(g.r.front() == Catch::Approx(-0.4).margin(1e-15));
  CHECK(g.r.back() == Catch::Approx(1.0).margin(1e-14));

  const SpatialGrid fine = build_grid(-0.4, 1.2, 256);
  CHECK(fine.dr == Catch::Approx(0.00625).epsilon(1e-15));
  CHECK(fine.r[64] == Catch::Approx(0.0).margin(1e-14));

  // FFT ordering: nonnegative frequencies first, then negative.
  CHECK(g.k[0] == 0.0);
  CHECK(g.k[1] == Catch::Approx(2.0 * std::numbers::pi / 1.6).epsilon(1e-14));
  CHECK(g.k[4] == Catch::Approx(-4.0 * 2.0 * std::numbers::pi / 1.6)
                      .epsilon(1e-14));
  CHECK(g.k[7] == Catch::Approx(-2.0 * std::numbers::pi / 1.6).epsilon(1e-14));
}

TEST_CASE("build_grid rejects bad shapes") {
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("Morse well values") {
  const SpatialGrid g = build_grid(-0.4, 1.2, 256);
  const MorseParams m;
  const dvector v = morse_potential(g, m);
  // r[64] = 0 is the minimum, exactly -D.
  CHECK(v[64] == Catch::Approx(-0.018).epsilon(1e-15));
  // r[224] = 1.
  CHECK(g.r[224] == Catch::Approx(1.0).margin(1e-13));
  CHECK(v[224] == Catch::Approx(-0.0045423886965208424).epsilon(1e-12));
  // Dissociative tail decays to zero.
  const SpatialGrid wide = build_grid(-0.4, 25.2, 512);
  const dvector vw = morse_potential(wide, m);
  CHECK(std::abs(vw.back()) < 1e-12);
}

TEST_CASE("Morse derived scales") {
  const MorseParams m;
  CHECK(m.omega() == Catch::Approx(1.2e-3).epsilon(1e-14));
  CHECK(m.r_tilde() == Catch::Approx(0.091287092917527679).epsilon(1e-14));
  CHECK(m.tau_osc() == Catch::Approx(5235.9877559829893).epsilon(1e-14));
  CHECK(au_to_fs(m.tau_osc()) ==
        Catch::Approx(126.65248577939485).epsilon(1e-14));
  CHECK(m.ground_energy() == Catch::Approx(-0.017405).epsilon(1e-13));
  CHECK_THROWS_AS(validate_morse(MorseParams{-1.0, 2.0, 1e5}),
                  std::invalid_argument);
}

TEST_CASE("coupling profile saturates and starts linear") {
  const SpatialGrid g = build_grid(-0.4, 1.2, 256);
  const dvector f = coupling_profile(g, 2.0);
  CHECK(f[64] == 0.0);  // R = 0
  CHECK(f[224] == Catch::Approx(0.43233235838169365).epsilon(1e-13));

  // On a millibohr grid the profile is linear to second order.
  const SpatialGrid fine = build_grid(-0.512, 0.512, 1024);
  const dvector ff = coupling_profile(fine, 2.0);
  const std::size_t idx = 513;  // r = 0.001
  REQUIRE(fine.r[idx] == Catch::Approx(0.001).margin(1e-15));
  CHECK(std::abs(ff[idx] - 0.001) < 1.5e-6);
  CHECK(std::abs(ff[idx] - 0.001) > 0.5e-6);
}

TEST_CASE("kinetic operator on analytic states") {
  const SpatialGrid g = build_grid(-0.4, 1.2, 256);
  const double mass = 1.0e5;

  SECTION("constant function has zero kinetic energy") {
    cvector c(g.n_points, cplx{0.5, -0.25});
    const cvector out = apply_kinetic(g, mass, c);
    for (const cplx& z : out) CHECK(std::abs(z) < 1e-12);
  }

  SECTION("plane waves are eigenfunctions") {
    const double km = g.k[5];
    cvector w(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i)
      w[i] = std::polar(1.0, km * g.r[i]);
    const cvector out = apply_kinetic(g, mass, w);
    const double expected = km * km / (2.0 * mass);
    for (std::size_t i = 0; i < g.n_points; ++i)
      CHECK(std::abs(out[i] - expected * w[i]) < 1e-10 * expected);
  }

  SECTION("Gaussian kinetic energy is 1/(4 M sigma^2)") {
    const double sigma = 0.09;
    const cvector psi = displaced_gaussian(g, 0.3, sigma);
    const cvector tpsi = apply_kinetic(g, mass, psi);
    const cplx e = grid_inner(g, psi, tpsi);
    const double expected = 1.0 / (4.0 * mass * sigma * sigma);
    CHECK(e.real() == Catch::Approx(expected).epsilon(1e-8));
    CHECK(std::abs(e.imag()) < 1e-15);
  }

  SECTION("Hermitian and linear") {
    std::mt19937 rng(42);
    std::normal_distribution<double> dist;
    cvector a(g.n_points), b(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i) {
      a[i] = cplx{dist(rng), dist(rng)};
      b[i] = cplx{dist(rng), dist(rng)};
    }
    const cvector ta = apply_kinetic(g, mass, a);
    const cvector tb = apply_kinetic(g, mass, b);
    const cplx lhs = grid_inner(g, a, tb);
    const cplx rhs = std::conj(grid_inner(g, b, ta));
    CHECK(std::abs(lhs - rhs) < 1e-12);

    cvector sum(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i)
      sum[i] = 2.0 * a[i] + cplx{0.0, 1.0} * b[i];
    const cvector tsum = apply_kinetic(g, mass, sum);
    for (std::size_t i = 0; i < g.n_points; ++i)
      CHECK(std::abs(tsum[i] - 2.0 * ta[i] - cplx{0.0, 1.0} * tb[i]) < 1e-12);
  }
}

TEST_CASE("Gaussian packets") {
  const SpatialGrid g = build_grid(-0.4, 1.2, 256);
  const MorseParams m;
  const cvector psi = displaced_gaussian(g, 2.0 * m.r_tilde(), m.r_tilde());
  CHECK(grid_norm(g, psi) == Catch::Approx(1.0).epsilon(1e-12));

  double mean_r = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i)
    mean_r += g.r[i] * std::norm(psi[i]) * g.dr;
  CHECK(mean_r == Catch::Approx(0.18257418583505536).epsilon(1e-10));

  SECTION("momentum boost adds drift energy, not density change") {
    const cvector still = gaussian_packet(g, 0.2, 0.09, 0.0);
    const cvector boosted = gaussian_packet(g, 0.2, 0.09, 30.0);
    for (std::size_t i = 0; i < g.n_points; ++i)
      CHECK(std::abs(std::abs(boosted[i]) - std::abs(still[i])) < 1e-12);
    const cvector tb = apply_kinetic(g, m.mass, boosted);
    const double e_kin = grid_inner(g, boosted, tb).real();
    const double expected =
        30.0 * 30.0 / (2.0 * m.mass) + 1.0 / (4.0 * m.mass * 0.09 * 0.09);
    CHECK(e_kin == Catch::Approx(expected).epsilon(1e-7));
  }

  SECTION("center outside the box is rejected") {
    CHECK_THROWS_AS(displaced_gaussian(g, 1.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(displaced_gaussian(g, -0.6, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(displaced_gaussian(g, 0.2, -0.1), std::invalid_argument);
  }
}
