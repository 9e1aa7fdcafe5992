#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msdiff/common.hpp"
#include "msdiff/linalg.hpp"
#include "msdiff/maxwellian.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/quadrature.hpp"

namespace msdiff {

// Lagrange multiplier triple of the entropy maximization for one species.
struct SpeciesMultipliers {
  double lambda0 = 0.0;
  Vec3 lambda1{};
  double lambda2 = 1.0;  // must stay positive for integrability
};

using Multipliers = std::vector<SpeciesMultipliers>;

// Exponential-family density f(v) = (1/b) exp(-(1 + l0 + l1.v + l2 |v|^2)).
struct ExpFamilyDensity {
  SpeciesMultipliers lam;
  double b = 1.0;

  double operator()(const Vec3& v) const {
    return (1.0 / b) * std::exp(-(1.0 + lam.lambda0 + dot(lam.lambda1, v) + lam.lambda2 * norm2(v)));
  }
  Vec3 center() const { return (-1.0 / (2.0 * lam.lambda2)) * lam.lambda1; }
  double width() const { return std::sqrt(0.5 / lam.lambda2); }
};

inline ExpFamilyDensity distribution_from_multipliers(const SpeciesMultipliers& lam, double b = 1.0) {
  require(lam.lambda2 > 0.0, "lambda2 must be positive for an integrable density");
  require(b > 0.0, "log-normalization constant must be positive");
  return ExpFamilyDensity{lam, b};
}

inline ExpFamilyDensity distribution_from_multipliers(const Multipliers& lam, const MixtureSpec& spec,
                                                      int i) {
  return distribution_from_multipliers(lam[i], spec.b(i));
}

// Multiplier relations solved in closed form from the constraint moments:
//   lambda2 = (5/3)(m_i/m0) / (2T),  lambda1 = -2 lambda2 alpha u_i,
//   (1/b) exp(-1-lambda0) exp(|lambda1|^2/(4 lambda2)) (pi/lambda2)^{3/2} = rho_i.
inline Multipliers multipliers_closed_form(const MixtureSpec& spec, const CellState& state,
                                           double alpha) {
  require(alpha >= 0.0, "alpha must be nonnegative");
  const int S = spec.species();
  Multipliers lam(S);
  for (int i = 0; i < S; ++i) {
    SpeciesMultipliers& li = lam[i];
    li.lambda2 = (5.0 / 3.0) * (spec.mass[i] / spec.m0) / (2.0 * state.T);
    li.lambda1 = (-2.0 * li.lambda2 * alpha) * state.vel[i];
    li.lambda0 = -1.0 - std::log(state.rho[i] * spec.b(i)) + norm2(li.lambda1) / (4.0 * li.lambda2) -
                 1.5 * std::log(li.lambda2 / M_PI);
  }
  return lam;
}

// Closed-form Gaussian moments of the exponential family, plus the moment
// derivatives with respect to (lambda0, lambda1, lambda2). Column order of
// the Jacobian matches that multiplier order.
struct ExpFamilyMoments {
  SpeciesMoments m;
  DenseMatrix jac{5};  // d(M0, M1x, M1y, M1z, M2) / d(l0, l1x, l1y, l1z, l2)
};

inline ExpFamilyMoments exp_family_moments(const SpeciesMultipliers& lam, double b) {
  require(lam.lambda2 > 0.0, "lambda2 must be positive for an integrable density");
  ExpFamilyMoments out;
  const double l2 = lam.lambda2;
  const Vec3 c = (-1.0 / (2.0 * l2)) * lam.lambda1;
  const double s2 = 0.5 / l2;
  const double amp = (1.0 / b) * std::exp(-1.0 - lam.lambda0 + norm2(lam.lambda1) / (4.0 * l2));
  const double M0 = amp * std::pow(M_PI / l2, 1.5);
  const double c2 = norm2(c);
  out.m.mass = M0;
  out.m.momentum = M0 * c;
  out.m.energy = M0 * (c2 + 3.0 * s2);

  const double third = M0 * (c2 + 5.0 * s2);           // integral of v_k |v|^2 f / c_k
  const double fourth = M0 * (c2 * c2 + 10.0 * c2 * s2 + 15.0 * s2 * s2);  // integral of |v|^4 f
  DenseMatrix& J = out.jac;
  J(0, 0) = -M0;
  for (int k = 0; k < 3; ++k) J(0, 1 + k) = -M0 * c[k];
  J(0, 4) = -out.m.energy;
  for (int j = 0; j < 3; ++j) {
    J(1 + j, 0) = -M0 * c[j];
    for (int k = 0; k < 3; ++k) J(1 + j, 1 + k) = -M0 * (c[j] * c[k] + (j == k ? s2 : 0.0));
    J(1 + j, 4) = -third * c[j];
  }
  J(4, 0) = -out.m.energy;
  for (int k = 0; k < 3; ++k) J(4, 1 + k) = -third * c[k];
  J(4, 4) = -fourth;
  return out;
}

inline void validate_targets(const SpeciesMoments& t) {
  require(t.mass > 0.0, "moment target mass must be positive");
  require(t.energy * t.mass > norm2(t.momentum),
          "infeasible moment targets: energy does not exceed the drift part (M2*M0 <= |M1|^2)");
}

namespace detail {

inline double scaled_residual_norm(const SpeciesMoments& m, const SpeciesMoments& t) {
  const double vscale = std::sqrt(t.energy / t.mass);
  double r = std::fabs(m.mass - t.mass) / t.mass;
  for (int k = 0; k < 3; ++k)
    r = std::max(r, std::fabs(m.momentum[k] - t.momentum[k]) / (t.mass * vscale));
  r = std::max(r, std::fabs(m.energy - t.energy) / t.energy);
  return r;
}

}  // namespace detail

// Damped Newton iteration on the five multipliers of one species so that the
// exponential-family moments match the targets to 1e-12 relative. The family
// is Gaussian, so the initial guess built from the moment-implied density,
// drift and width is already the solution up to round-off; the iteration
// polishes it and guards against inconsistent inputs.
inline SpeciesMultipliers solve_dual(const SpeciesMoments& targets, const MixtureSpec& spec, int i,
                                     double tol = 1e-12, int max_iterations = 50) {
  validate_targets(targets);
  const double b = spec.b(i);

  const Vec3 c0 = targets.momentum / targets.mass;
  const double s2 = (targets.energy / targets.mass - norm2(c0)) / 3.0;
  SpeciesMultipliers lam;
  lam.lambda2 = 0.5 / s2;
  lam.lambda1 = (-2.0 * lam.lambda2) * c0;
  lam.lambda0 = -1.0 - std::log(targets.mass * b) + norm2(lam.lambda1) / (4.0 * lam.lambda2) -
                1.5 * std::log(lam.lambda2 / M_PI);

  ExpFamilyMoments cur = exp_family_moments(lam, b);
  double res = detail::scaled_residual_norm(cur.m, targets);
  for (int it = 0; it < max_iterations && res > tol; ++it) {
    std::vector<double> rhs{targets.mass - cur.m.mass,
                            targets.momentum[0] - cur.m.momentum[0],
                            targets.momentum[1] - cur.m.momentum[1],
                            targets.momentum[2] - cur.m.momentum[2],
                            targets.energy - cur.m.energy};
    DenseMatrix J = cur.jac;
    solve_in_place(J, rhs);

    // Halve the step until the scaled residual decreases and lambda2 stays positive.
    double step = 1.0;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      SpeciesMultipliers trial = lam;
      trial.lambda0 += step * rhs[0];
      for (int k = 0; k < 3; ++k) trial.lambda1[k] += step * rhs[1 + k];
      trial.lambda2 += step * rhs[4];
      if (trial.lambda2 <= 0.0) continue;
      ExpFamilyMoments trial_m = exp_family_moments(trial, b);
      const double trial_res = detail::scaled_residual_norm(trial_m.m, targets);
      if (trial_res < res) {
        lam = trial;
        cur = trial_m;
        res = trial_res;
        break;
      }
    }
  }
  if (res > tol)
    throw numerical_error("dual Newton did not converge: residual " + std::to_string(res) +
                          " above tolerance " + std::to_string(tol));
  return lam;
}

// Entropy density of the maximizer, consistent with H_i = -int f log(b f):
//   H_i = { 3/2 - log[ b_i (5/(3 m0))^{3/2} rho_i (m_i/(2 pi T))^{3/2} ] } rho_i.
inline double entropy_density(const MixtureSpec& spec, const CellState& state, int i) {
  const double amplitude = std::pow(5.0 / (3.0 * spec.m0), 1.5) * state.rho[i] *
                           std::pow(spec.mass[i] / (2.0 * M_PI * state.T), 1.5);
  return (1.5 - std::log(spec.b(i) * amplitude)) * state.rho[i];
}

// Entropy flux Phi_i = alpha H_i u_i.
inline Vec3 entropy_flux(const MixtureSpec& spec, const CellState& state, double alpha, int i) {
  return (alpha * entropy_density(spec, state, i)) * state.vel[i];
}

}  // namespace msdiff
