#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msdiff/collision.hpp"
#include "msdiff/mc_oracle.hpp"
#include "msdiff/random_states.hpp"

using namespace msdiff;

namespace {

// Acceptance helper: 3-sigma statistical band plus a round-off allowance for
// test functions the collision kinematics conserve exactly.
bool within_band(double estimate, double stderr_v, double closed, double abs_floor) {
  return std::fabs(estimate - closed) <= 3.0 * stderr_v + abs_floor;
}

double noise_floor(const MixtureSpec& spec, const CellState& state, int i, int j) {
  const double kernel_weight = 2.0 * M_PI * spec.kernel_norm(i, j) * state.rho[i] * state.rho[j];
  return 1e-12 * kernel_weight * (1.0 + 6.0 * state.T);
}

}  // namespace

TEST_CASE("post-collision velocities satisfy the pairwise conservation laws") {
  const std::uint64_t seed = 1001ull;
  for (int k = 0; k < 200; ++k) {
    const double mi = uniform_in(seed, k, 0, 0.5, 3.0);
    const double mj = uniform_in(seed, k, 1, 0.5, 3.0);
    const Vec3 v = normal3(seed, k, 2, Vec3{0.3, -0.2, 0.0}, 1.3);
    const Vec3 vstar = normal3(seed, k, 6, Vec3{-0.5, 0.1, 0.4}, 0.7);
    const Vec3 sigma = sphere_uniform(seed, k, 10);
    Vec3 vp, vsp;
    detail::post_collision(mi, mj, v, vstar, sigma, vp, vsp);

    const Vec3 p_before = mi * v + mj * vstar;
    const Vec3 p_after = mi * vp + mj * vsp;
    for (int c = 0; c < 3; ++c)
      REQUIRE(p_after[c] == Catch::Approx(p_before[c]).margin(1e-12 * (1.0 + std::fabs(p_before[c]))));

    const double e_before = 0.5 * mi * norm2(v) + 0.5 * mj * norm2(vstar);
    const double e_after = 0.5 * mi * norm2(vp) + 0.5 * mj * norm2(vsp);
    REQUIRE(e_after == Catch::Approx(e_before).epsilon(1e-12));
  }
}

TEST_CASE("oracle is reproducible for a fixed seed and thread count independent") {
  const MixtureSpec spec = random_mixture(7, 0, 2);
  const CellState state = random_state(7, 0, 2);
  const OracleEstimate a = mc_weak_form(spec, state, 0.5, 0, 1, WeakFormPsi::SpeedSquared, 20000, 42);
  const OracleEstimate b = mc_weak_form(spec, state, 0.5, 0, 1, WeakFormPsi::SpeedSquared, 20000, 42);
  REQUIRE(a.mean[0] == b.mean[0]);
  REQUIRE(a.stderr_[0] == b.stderr_[0]);

  const OracleEstimate c =
      mc_weak_form(spec, state, 0.5, 0, 1, WeakFormPsi::SpeedSquared, 20000, 42, 4);
  REQUIRE(a.mean[0] == c.mean[0]);
  REQUIRE(a.stderr_[0] == c.stderr_[0]);

  const OracleEstimate d = mc_weak_form(spec, state, 0.5, 0, 1, WeakFormPsi::SpeedSquared, 20000, 43);
  REQUIRE(a.mean[0] != d.mean[0]);
}

TEST_CASE("sample count below the minimum is rejected") {
  const MixtureSpec spec = random_mixture(7, 0, 2);
  const CellState state = random_state(7, 0, 2);
  REQUIRE_THROWS_AS(mc_weak_form(spec, state, 0.5, 0, 1, WeakFormPsi::Unit, 999, 1),
                    validation_error);
}

TEST_CASE("number conservation: unit test function gives a zero estimator") {
  const MixtureSpec spec = random_mixture(11, 2, 2);
  const CellState state = random_state(11, 2, 2);
  const OracleEstimate bi = mc_weak_form(spec, state, 1.0, 0, 1, WeakFormPsi::Unit, 5000, 5);
  REQUIRE(bi.mean[0] == 0.0);
  REQUIRE(bi.stderr_[0] == 0.0);
  const OracleEstimate mono = mc_weak_form(spec, state, 1.0, 0, 0, WeakFormPsi::Unit, 5000, 5);
  REQUIRE(mono.mean[0] == 0.0);
  REQUIRE(mono.stderr_[0] == 0.0);
}

TEST_CASE("mono-species momentum and energy integrals vanish") {
  const MixtureSpec spec = random_mixture(13, 4, 2);
  const CellState state = random_state(13, 4, 2);
  const double floor = noise_floor(spec, state, 0, 0);

  const OracleEstimate b = mc_weak_form(spec, state, 0.8, 0, 0, WeakFormPsi::Velocity, 50000, 9);
  for (int k = 0; k < 3; ++k) REQUIRE(within_band(b.mean[k], b.stderr_[k], 0.0, floor));

  const OracleEstimate a = mc_weak_form(spec, state, 0.8, 0, 0, WeakFormPsi::SpeedSquared, 50000, 9);
  REQUIRE(within_band(a.mean[0], a.stderr_[0], 0.0, floor));
}

TEST_CASE("bi-species estimates match the closed-form exchange integrals") {
  // Worked instance: alpha=1, m=(1,1), ||b_12||=1/pi, rho=(1,1), u2-u1=e_x
  // has E = 1.
  MixtureSpec spec = make_mixture({1.0, 1.0}, {1.0 / M_PI, 1.0 / M_PI, 1.0 / M_PI, 1.0 / M_PI}, 1.0);
  CellState state;
  state.rho = {1.0, 1.0};
  state.vel = {Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 0.0, 0.0}};
  state.T = 1.0;
  const OracleEstimate e =
      mc_weak_form(spec, state, 1.0, 0, 1, WeakFormPsi::SpeedSquared, 1000000, 2026);
  REQUIRE(e.stderr_[0] > 0.0);
  REQUIRE(within_band(e.mean[0], e.stderr_[0], 1.0, 0.0));

  // Randomized cross-checks of E and F at moderate sample counts.
  const std::uint64_t seed = 31415ull;
  for (int id = 0; id < 4; ++id) {
    const MixtureSpec rspec = random_mixture(seed, id, 2);
    const CellState rstate = random_state(seed, id, 2);
    const double alpha = (id % 2) ? 1.0 : 0.1;
    const std::uint64_t run_seed = 1000 + id;

    const OracleEstimate ee =
        mc_weak_form(rspec, rstate, alpha, 0, 1, WeakFormPsi::SpeedSquared, 200000, run_seed);
    REQUIRE(within_band(ee.mean[0], ee.stderr_[0], energy_exchange_rate(rspec, rstate, alpha, 0, 1),
                        0.0));

    const OracleEstimate ff =
        mc_weak_form(rspec, rstate, alpha, 0, 1, WeakFormPsi::Velocity, 200000, run_seed + 50);
    const Vec3 closed = velocity_exchange_integral(rspec, rstate, alpha, 0, 1);
    for (int k = 0; k < 3; ++k) REQUIRE(within_band(ff.mean[k], ff.stderr_[k], closed[k], 0.0));
  }
}
