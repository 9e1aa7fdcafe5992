#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msdiff/mep.hpp"
#include "msdiff/random_states.hpp"

using namespace msdiff;

namespace {

MixtureSpec unit_binary() {
  return make_mixture({1.0, 1.0}, {1.0 / M_PI, 1.0 / M_PI, 1.0 / M_PI, 1.0 / M_PI}, 1.0);
}

double multiplier_discrepancy(const SpeciesMultipliers& a, const SpeciesMultipliers& b) {
  double scale = std::max({1.0, std::fabs(b.lambda0), std::fabs(b.lambda2), std::fabs(b.lambda1[0]),
                           std::fabs(b.lambda1[1]), std::fabs(b.lambda1[2])});
  double d = std::max(std::fabs(a.lambda0 - b.lambda0), std::fabs(a.lambda2 - b.lambda2));
  for (int k = 0; k < 3; ++k) d = std::max(d, std::fabs(a.lambda1[k] - b.lambda1[k]));
  return d / scale;
}

}  // namespace

TEST_CASE("closed-form multipliers reproduce the stated relations") {
  const MixtureSpec spec = unit_binary();
  CellState state;
  state.rho = {1.0, 1.0};
  state.vel = {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}};
  state.T = 1.0;

  SECTION("lambda2 = 5/6 for m = m0, T = 1") {
    const Multipliers lam = multipliers_closed_form(spec, state, 0.0);
    REQUIRE(lam[0].lambda2 == Catch::Approx(5.0 / 6.0).epsilon(1e-15));
  }
  SECTION("alpha = 0 kills the drift multiplier") {
    const Multipliers lam = multipliers_closed_form(spec, state, 0.0);
    for (int k = 0; k < 3; ++k) REQUIRE(lam[0].lambda1[k] == 0.0);
  }
  SECTION("lambda1 = -2 lambda2 alpha u") {
    const Multipliers lam = multipliers_closed_form(spec, state, 0.1);
    REQUIRE(lam[0].lambda1[0] == Catch::Approx(-1.0 / 6.0).epsilon(1e-14));
    REQUIRE(lam[0].lambda1[1] == 0.0);
    REQUIRE(lam[0].lambda1[2] == 0.0);
  }
}

TEST_CASE("exponential family from closed-form multipliers equals the maximizer") {
  const std::uint64_t seed = 99173ull;
  const int S = 3;
  const MixtureSpec spec = random_mixture(seed, 0, S);
  const CellState state = random_state(seed, 0, S);
  const double alpha = 0.1;
  const Multipliers lam = multipliers_closed_form(spec, state, alpha);
  for (int i = 0; i < S; ++i) {
    const ExpFamilyDensity f = distribution_from_multipliers(lam, spec, i);
    for (int k = 0; k < 100; ++k) {
      const Vec3 v{uniform_in(seed, k, 1, -3, 3), uniform_in(seed, k, 2, -3, 3),
                   uniform_in(seed, k, 3, -3, 3)};
      const double a = f(v);
      const double b = maxwellian_eval(spec, state, alpha, i, v);
      REQUIRE(std::fabs(a - b) <= 1e-14 * std::max(a, b));
    }
  }
}

TEST_CASE("exponential family symmetry and normalization scaling") {
  SpeciesMultipliers lam;
  lam.lambda0 = 0.3;
  lam.lambda1 = {0.0, 0.0, 0.0};
  lam.lambda2 = 0.8;
  const ExpFamilyDensity f = distribution_from_multipliers(lam);
  const Vec3 v{0.4, -1.1, 0.6};
  REQUIRE(f(v) == Catch::Approx(f(Vec3{-0.4, 1.1, -0.6})).epsilon(1e-15));

  // Doubling exp(-1-lambda0) doubles the density pointwise.
  SpeciesMultipliers doubled = lam;
  doubled.lambda0 = lam.lambda0 - std::log(2.0);
  const ExpFamilyDensity f2 = distribution_from_multipliers(doubled);
  REQUIRE(f2(v) == Catch::Approx(2.0 * f(v)).epsilon(1e-14));
}

TEST_CASE("nonpositive lambda2 is rejected") {
  SpeciesMultipliers lam;
  lam.lambda2 = 0.0;
  REQUIRE_THROWS_AS(distribution_from_multipliers(lam), validation_error);
  lam.lambda2 = -1.0;
  REQUIRE_THROWS_AS(distribution_from_multipliers(lam), validation_error);
}

TEST_CASE("dual Newton matches the closed form on the worked state") {
  const MixtureSpec spec = unit_binary();
  CellState state;
  state.rho = {1.0, 1.0};
  state.vel = {Vec3{0.3, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}};
  state.T = 2.0;
  const double alpha = 0.1;
  const SpeciesMoments targets = maxwellian_moments(spec, state, alpha, 0);
  const SpeciesMultipliers dual = solve_dual(targets, spec, 0);
  const Multipliers closed = multipliers_closed_form(spec, state, alpha);
  REQUIRE(multiplier_discrepancy(dual, closed[0]) <= 1e-10);
}

TEST_CASE("dual Newton agrees with the closed form on randomized states") {
  const std::uint64_t seed = 555001ull;
  for (int id = 0; id < 50; ++id) {
    const int S = pick_species_count(seed, id);
    const MixtureSpec spec = random_mixture(seed, id, S);
    const CellState state = random_state(seed, id, S);
    const double alpha = pick_alpha(seed, id);
    const Multipliers closed = multipliers_closed_form(spec, state, alpha);
    for (int i = 0; i < S; ++i) {
      const SpeciesMultipliers dual = solve_dual(maxwellian_moments(spec, state, alpha, i), spec, i);
      REQUIRE(multiplier_discrepancy(dual, closed[i]) <= 1e-10);
    }
  }
}

TEST_CASE("symmetric targets produce a vanishing drift multiplier") {
  const MixtureSpec spec = unit_binary();
  SpeciesMoments targets;
  targets.mass = 2.0;
  targets.momentum = {0.0, 0.0, 0.0};
  targets.energy = 5.0;
  const SpeciesMultipliers lam = solve_dual(targets, spec, 0);
  for (int k = 0; k < 3; ++k) REQUIRE(std::fabs(lam.lambda1[k]) <= 1e-12);
}

TEST_CASE("infeasible targets are rejected") {
  const MixtureSpec spec = unit_binary();
  SpeciesMoments targets;
  targets.mass = 1.0;
  targets.momentum = {3.0, 0.0, 0.0};
  targets.energy = 8.9;  // M2 M0 < |M1|^2
  REQUIRE_THROWS_AS(solve_dual(targets, spec, 0), validation_error);
}

TEST_CASE("entropy density zero point and quadrature oracle") {
  const MixtureSpec spec = unit_binary();
  CellState state;
  state.rho = {1.0, 1.0};
  state.vel = {Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}};
  state.T = 1.0;

  SECTION("H vanishes when the log argument equals e^{3/2}") {
    // b (5/(3 m0))^{3/2} rho (m/(2 pi T))^{3/2} = e^{3/2}  =>  H = 0.
    state.rho[0] = std::exp(1.5) / (std::pow(5.0 / 3.0, 1.5) * std::pow(1.0 / (2.0 * M_PI), 1.5));
    REQUIRE(std::fabs(entropy_density(spec, state, 0)) <= 1e-12 * state.rho[0]);
  }

  SECTION("H equals the quadrature integral on randomized states") {
    const std::uint64_t seed = 31337ull;
    for (int id = 0; id < 10; ++id) {
      const int S = pick_species_count(seed, id);
      const MixtureSpec rspec = random_mixture(seed, id, S);
      const CellState rstate = random_state(seed, id, S);
      const double alpha = pick_alpha(seed, id);
      for (int i = 0; i < S; ++i) {
        auto f = [&](const Vec3& v) { return maxwellian_eval(rspec, rstate, alpha, i, v); };
        const double quad = entropy_integral_numeric(f, rspec.b(i), 40, alpha * rstate.vel[i],
                                                     thermal_width(rspec, rstate.T, i));
        const double closed = entropy_density(rspec, rstate, i);
        REQUIRE(std::fabs(quad - closed) <= 1e-10 * std::max(1.0, std::fabs(closed)));
      }
    }
  }

  SECTION("flux vanishes with the velocity") {
    const Vec3 phi = entropy_flux(spec, state, 0.8, 0);
    REQUIRE(phi[0] == 0.0);
    REQUIRE(phi[1] == 0.0);
    REQUIRE(phi[2] == 0.0);
  }
}

TEST_CASE("entropy density shifts additively in the log-normalization") {
  MixtureSpec spec = unit_binary();
  CellState state;
  state.rho = {1.4, 0.8};
  state.vel = {Vec3{0, 0, 0}, Vec3{0, 0, 0}};
  state.T = 0.7;
  const double h1 = entropy_density(spec, state, 0);
  spec.log_norm_b = {3.0, 1.0};
  const double h3 = entropy_density(spec, state, 0);
  REQUIRE(h3 - h1 == Catch::Approx(-state.rho[0] * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("same-moments Gaussian mixtures have strictly lower entropy") {
  const std::uint64_t seed = 777001ull;
  for (int id = 0; id < 8; ++id) {
    const int S = 2;
    const MixtureSpec spec = random_mixture(seed, id, S);
    const CellState state = random_state(seed, id, S);
    const double alpha = pick_alpha(seed, id);
    const int i = 0;

    const SpeciesMoments target = maxwellian_moments(spec, state, alpha, i);
    const Vec3 cbar = target.momentum / target.mass;
    const double s2 = (target.energy / target.mass - norm2(cbar)) / 3.0;
    const double s = std::sqrt(s2);

    // Split the mass into two shifted components, shrinking the common width
    // to keep all three constraint moments.
    const double theta = 0.35 + 0.3 * uniform01(seed, id, 55);
    const double delta = 0.5 * s;
    const Vec3 ca = cbar + Vec3{(1.0 - theta) * delta, 0.0, 0.0};
    const Vec3 cb = cbar - Vec3{theta * delta, 0.0, 0.0};
    const double s2adj = s2 - theta * (1.0 - theta) * delta * delta / 3.0;
    REQUIRE(s2adj > 0.0);

    const double rho_a = theta * target.mass;
    const double rho_b = (1.0 - theta) * target.mass;
    auto component = [&](double rho, const Vec3& c, const Vec3& v) {
      return rho / std::pow(2.0 * M_PI * s2adj, 1.5) * std::exp(-norm2(v - c) / (2.0 * s2adj));
    };
    auto mixture = [&](const Vec3& v) { return component(rho_a, ca, v) + component(rho_b, cb, v); };

    // The mixture really carries the same moments.
    const SpeciesMoments mm = moments_numeric(mixture, 40, cbar, s);
    REQUIRE(mm.mass == Catch::Approx(target.mass).epsilon(1e-9));
    REQUIRE(mm.energy == Catch::Approx(target.energy).epsilon(1e-9));

    const double h_mix = entropy_integral_numeric(mixture, spec.b(i), 40, cbar, s);
    const double h_max = entropy_density(spec, state, i);
    REQUIRE(h_mix < h_max - 1e-8 * std::max(1.0, std::fabs(h_max)));
  }
}
