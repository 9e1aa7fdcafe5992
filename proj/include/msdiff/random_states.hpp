#pragma once

#include <cstdint>

#include "msdiff/mixture.hpp"
#include "msdiff/rng.hpp"

namespace msdiff {

// Randomized mixtures and cell states for oracle sweeps: masses in [0.5, 2],
// kernel norms in [0.1, 1], rho in [0.1, 10], T in [0.1, 10], |u| <= 1.
// Deterministic in (seed, id).

inline double uniform_in(std::uint64_t seed, std::uint64_t id, std::uint64_t lane, double lo,
                         double hi) {
  return lo + (hi - lo) * uniform01(seed, id, lane);
}

inline MixtureSpec random_mixture(std::uint64_t seed, std::uint64_t id, int S) {
  MixtureSpec spec;
  spec.mass.resize(S);
  std::uint64_t lane = 100;
  double msum = 0.0;
  for (int i = 0; i < S; ++i) {
    spec.mass[i] = uniform_in(seed, id, lane++, 0.5, 2.0);
    msum += spec.mass[i];
  }
  spec.m0 = msum / S;
  spec.kernel_norms.assign(static_cast<std::size_t>(S) * S, 0.0);
  for (int i = 0; i < S; ++i)
    for (int j = i; j < S; ++j) {
      const double v = uniform_in(seed, id, lane++, 0.1, 1.0);
      spec.kernel_norm_ref(i, j) = v;
      spec.kernel_norm_ref(j, i) = v;
    }
  spec.validate();
  return spec;
}

inline CellState random_state(std::uint64_t seed, std::uint64_t id, int S) {
  CellState state;
  state.rho.resize(S);
  state.vel.resize(S);
  std::uint64_t lane = 300;
  for (int i = 0; i < S; ++i) {
    state.rho[i] = uniform_in(seed, id, lane++, 0.1, 10.0);
    for (int k = 0; k < 3; ++k)
      state.vel[i][k] = uniform_in(seed, id, lane++, -0.577, 0.577);  // |u| <= 1
  }
  state.T = uniform_in(seed, id, lane++, 0.1, 10.0);
  state.validate();
  return state;
}

// The alpha grid of the randomized MEP sweeps.
inline double pick_alpha(std::uint64_t seed, std::uint64_t id) {
  const double alphas[3] = {0.0, 0.1, 1.0};
  return alphas[counter_hash(seed, id, 900) % 3];
}

inline int pick_species_count(std::uint64_t seed, std::uint64_t id) {
  return 2 + static_cast<int>(counter_hash(seed, id, 901) % 3);
}

}  // namespace msdiff
