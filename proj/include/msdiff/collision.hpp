#pragma once

#include <cmath>

#include "msdiff/common.hpp"
#include "msdiff/mixture.hpp"

namespace msdiff {

// Closed-form weak-form collision integrals for Maxwell molecules evaluated
// on the scaled Maxwellians. All expressions are exact in the moments.

// Momentum exchange rate of species i against species j (alpha-stripped):
//   R_ij = 2 pi ||b_ij|| (m_j/(m_i+m_j)) rho_i rho_j (u_j - u_i).
// Mass-weighted antisymmetry m_i R_ij + m_j R_ji = 0 holds identically.
inline Vec3 momentum_exchange_rate(const MixtureSpec& spec, const CellState& state, int i, int j) {
  require(i != j, "momentum exchange needs two distinct species");
  const double mi = spec.mass[i], mj = spec.mass[j];
  const double coeff = 2.0 * M_PI * spec.kernel_norm(i, j) * (mj / (mi + mj)) * state.rho[i] * state.rho[j];
  return coeff * (state.vel[j] - state.vel[i]);
}

// Weak-form momentum integral F_ij = alpha (m_j/(m_i+m_j)) 2 pi ||b_ij|| rho_i rho_j (u_j - u_i).
inline Vec3 velocity_exchange_integral(const MixtureSpec& spec, const CellState& state, double alpha,
                                       int i, int j) {
  require(i != j, "velocity exchange needs two distinct species");
  const double mi = spec.mass[i], mj = spec.mass[j];
  const double coeff =
      alpha * (mj / (mi + mj)) * 2.0 * M_PI * spec.kernel_norm(i, j) * state.rho[i] * state.rho[j];
  return coeff * (state.vel[j] - state.vel[i]);
}

// Weak-form energy integral
//   E_ij = alpha^2 4 pi ||b_ij|| (m_j rho_i rho_j/(m_i+m_j)^2) (m_i u_i + m_j u_j).(u_j - u_i).
inline double energy_exchange_rate(const MixtureSpec& spec, const CellState& state, double alpha,
                                   int i, int j) {
  require(i != j, "energy exchange needs two distinct species");
  const double mi = spec.mass[i], mj = spec.mass[j];
  const Vec3 diff = state.vel[j] - state.vel[i];
  const Vec3 weighted = mi * state.vel[i] + mj * state.vel[j];
  return alpha * alpha * 4.0 * M_PI * spec.kernel_norm(i, j) * mj * state.rho[i] * state.rho[j] /
         ((mi + mj) * (mi + mj)) * dot(weighted, diff);
}

// Partial entropy production of species i:
//   D_i = alpha^2 (10 pi/(3 T m0)) sum_{j != i} ||b_ij|| (m_i m_j rho_i rho_j/(m_i+m_j))
//         [ (m_i u_i + m_j u_j)/(m_i+m_j) . (u_j - u_i) - u_i . (u_j - u_i) ].
inline double entropy_production_species(const MixtureSpec& spec, const CellState& state,
                                         double alpha, int i) {
  const int S = spec.species();
  double sum = 0.0;
  for (int j = 0; j < S; ++j) {
    if (j == i) continue;
    const double mi = spec.mass[i], mj = spec.mass[j];
    const Vec3 diff = state.vel[j] - state.vel[i];
    const Vec3 mixture_vel = (1.0 / (mi + mj)) * (mi * state.vel[i] + mj * state.vel[j]);
    const double bracket = dot(mixture_vel, diff) - dot(state.vel[i], diff);
    sum += spec.kernel_norm(i, j) * (mi * mj * state.rho[i] * state.rho[j] / (mi + mj)) * bracket;
  }
  return alpha * alpha * (10.0 * M_PI / (3.0 * state.T * spec.m0)) * sum;
}

// Total entropy production (nonnegative quadratic form in velocity differences):
//   D = alpha^2 (5 pi/(3 T m0)) sum_i sum_{j != i} ||b_ij|| (m_i m_j/(m_i+m_j)) rho_i rho_j |u_j - u_i|^2.
inline double entropy_production_total(const MixtureSpec& spec, const CellState& state, double alpha) {
  const int S = spec.species();
  double sum = 0.0;
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) {
      if (j == i) continue;
      const double mi = spec.mass[i], mj = spec.mass[j];
      sum += spec.kernel_norm(i, j) * (mi * mj / (mi + mj)) * state.rho[i] * state.rho[j] *
             norm2(state.vel[j] - state.vel[i]);
    }
  return alpha * alpha * (5.0 * M_PI / (3.0 * state.T * spec.m0)) * sum;
}

// alpha-stripped production D / alpha^2; stays finite in the diffusion limit
// and is the source term of the alpha-stripped entropy balance.
inline double entropy_production_total_stripped(const MixtureSpec& spec, const CellState& state) {
  return entropy_production_total(spec, state, 1.0);
}

inline double entropy_production_species_stripped(const MixtureSpec& spec, const CellState& state,
                                                  int i) {
  return entropy_production_species(spec, state, 1.0, i);
}

}  // namespace msdiff
