#pragma once

#include <cmath>

#include "msdiff/common.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/quadrature.hpp"

namespace msdiff {

// Per-axis standard deviation of the scaled Maxwellian of species i:
// sigma^2 = 3 m0 T / (5 m_i).
inline double thermal_width(const MixtureSpec& spec, double T, int i) {
  return std::sqrt(3.0 * spec.m0 * T / (5.0 * spec.mass[i]));
}

// Scaled Maxwellian that maximizes kinetic entropy under the mass, momentum
// and energy constraints:
//   f_i(v) = (5/(3 m0))^{3/2} rho_i (m_i/(2 pi T))^{3/2}
//            exp(-(5/(3 m0)) m_i |v - alpha u_i|^2 / (2 T)).
inline double maxwellian_eval(const MixtureSpec& spec, const CellState& state, double alpha,
                              int i, const Vec3& v) {
  require(alpha >= 0.0, "alpha must be nonnegative");
  const double mi = spec.mass[i];
  const double T = state.T;
  const double prefactor = std::pow(5.0 / (3.0 * spec.m0), 1.5) * state.rho[i] *
                           std::pow(mi / (2.0 * M_PI * T), 1.5);
  const Vec3 shifted = v - alpha * state.vel[i];
  return prefactor * std::exp(-(5.0 / (3.0 * spec.m0)) * mi * norm2(shifted) / (2.0 * T));
}

// Closed-form constraint moments of the maximizer:
//   M0 = rho_i, M1 = alpha rho_i u_i, M2 = alpha^2 rho_i |u_i|^2 + 3 rho_i (3 m0/(5 m_i)) T.
inline SpeciesMoments maxwellian_moments(const MixtureSpec& spec, const CellState& state,
                                         double alpha, int i) {
  SpeciesMoments m;
  m.mass = state.rho[i];
  m.momentum = (alpha * state.rho[i]) * state.vel[i];
  m.energy = alpha * alpha * state.rho[i] * norm2(state.vel[i]) +
             3.0 * state.rho[i] * (3.0 * spec.m0 / (5.0 * spec.mass[i])) * state.T;
  return m;
}

// Quadrature moments of the maximizer with the natural shift/width hints.
inline SpeciesMoments maxwellian_moments_numeric(const MixtureSpec& spec, const CellState& state,
                                                 double alpha, int i, int order = 40) {
  const Vec3 shift = alpha * state.vel[i];
  const double width = thermal_width(spec, state.T, i);
  return moments_numeric([&](const Vec3& v) { return maxwellian_eval(spec, state, alpha, i, v); },
                         order, shift, width);
}

}  // namespace msdiff
