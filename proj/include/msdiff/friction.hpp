#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msdiff/common.hpp"
#include "msdiff/linalg.hpp"
#include "msdiff/mixture.hpp"

namespace msdiff {

// Extra linear condition that closes the rank-(S-1) momentum relations.
enum class Closure { Equimolar, MassAverage };

// Singular pairwise friction system B u = g of the diffusion-limit momentum
// relations. B annihilates constant velocity vectors (row sums vanish) and
// has the mass vector as left null vector; g_i = (3 m0/(5 m_i)) d/dx(rho_i T).
struct FrictionSystem {
  DenseMatrix B;
  std::vector<double> g;
};

// Friction matrix: off-diagonal B_ij = 2 pi ||b_ij|| (m_j/(m_i+m_j)) rho_i rho_j,
// diagonal chosen so each row sums to zero. Rank S-1 for positive densities
// and an irreducible off-diagonal kernel pattern.
inline DenseMatrix friction_matrix(const MixtureSpec& spec, const CellState& state) {
  const int S = spec.species();
  DenseMatrix B(S);
  for (int i = 0; i < S; ++i) {
    double diag = 0.0;
    for (int j = 0; j < S; ++j) {
      if (j == i) continue;
      const double coeff = 2.0 * M_PI * spec.kernel_norm(i, j) *
                           (spec.mass[j] / (spec.mass[i] + spec.mass[j])) * state.rho[i] * state.rho[j];
      B(i, j) = coeff;
      diag -= coeff;
    }
    B(i, i) = diag;
  }
  return B;
}

inline FrictionSystem build_friction_system(const MixtureSpec& spec, const CellState& state,
                                            const std::vector<double>& pressure_gradient) {
  const int S = spec.species();
  require(static_cast<int>(pressure_gradient.size()) == S,
          "pressure gradient must have one entry per species");
  FrictionSystem sys;
  sys.B = friction_matrix(spec, state);
  sys.g.resize(S);
  for (int i = 0; i < S; ++i)
    sys.g[i] = (3.0 * spec.m0 / (5.0 * spec.mass[i])) * pressure_gradient[i];
  return sys;
}

// Solves B u = g together with the closure row via the bordered square system
//   [ B  m ] [u]   [g]
//   [ c' 0 ] [s] = [0],
// where m is the mass vector (spanning the range complement of B) and c the
// closure weights. Solvability requires the compatibility condition m'g = 0,
// i.e. a spatially uniform total pressure.
// `gradient_scale` is an optional magnitude floor for the compatibility
// check; steppers pass a domain-scale pressure gradient so that round-off in
// a fully relaxed field is not mistaken for a genuine pressure nonuniformity.
inline std::vector<double> solve_velocities(const FrictionSystem& sys, const MixtureSpec& spec,
                                            const CellState& state, Closure closure,
                                            double compatibility_tol = 1e-8,
                                            double gradient_scale = 0.0) {
  const int S = spec.species();
  double mg = 0.0, gnorm = 0.0, mscale = 0.0;
  for (int i = 0; i < S; ++i) {
    mg += spec.mass[i] * sys.g[i];
    gnorm = std::max(gnorm, std::fabs(sys.g[i]));
    mscale = std::max(mscale, spec.mass[i]);
  }
  if (std::fabs(mg) > compatibility_tol * std::max(1e-300, mscale * std::max(gnorm, gradient_scale)))
    throw numerical_error("velocity solve incompatible: mass-weighted pressure-gradient residual " +
                          std::to_string(mg) + " (total pressure is not spatially uniform)");

  bool all_floored = true;
  for (int i = 0; i < S; ++i)
    if (state.rho[i] > kDensityFloor) all_floored = false;
  if (all_floored)
    throw numerical_error("degenerate state: all species densities at the zero floor");

  DenseMatrix A(S + 1);
  std::vector<double> rhs(S + 1, 0.0);
  for (int i = 0; i < S; ++i) {
    for (int j = 0; j < S; ++j) A(i, j) = sys.B(i, j);
    A(i, S) = spec.mass[i];
    rhs[i] = sys.g[i];
    A(S, i) = (closure == Closure::Equimolar) ? state.rho[i] : spec.mass[i] * state.rho[i];
  }
  A(S, S) = 0.0;
  solve_in_place(A, rhs);
  rhs.resize(S);
  return rhs;
}

}  // namespace msdiff
