#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msdiff/collision.hpp"
#include "msdiff/common.hpp"
#include "msdiff/mep.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/solver.hpp"

namespace msdiff {

// Entropy bookkeeping of one field: per-cell, per-species densities, fluxes
// and productions plus their domain integrals. D carries the alpha^2 scaling
// of the balance law; D_stripped is D/alpha^2, which stays finite in the
// diffusion limit.
struct EntropyReport {
  std::vector<std::vector<double>> H;          // [cell][species]
  std::vector<std::vector<Vec3>> Phi;          // [cell][species]
  std::vector<std::vector<double>> D_species;  // [cell][species]
  std::vector<double> H_total;                 // per cell
  std::vector<double> D_total;                 // per cell
  std::vector<double> D_total_stripped;        // per cell
  double int_H = 0.0;
  double int_D = 0.0;
  double int_D_stripped = 0.0;
  double max_balance_residual = 0.0;  // filled by entropy_balance_residual
};

inline EntropyReport entropy_report(const Field1D& field, const MixtureSpec& spec, double alpha) {
  field.validate();
  const int N = field.size();
  const int S = spec.species();
  EntropyReport rep;
  rep.H.assign(N, std::vector<double>(S, 0.0));
  rep.Phi.assign(N, std::vector<Vec3>(S, kZeroVec));
  rep.D_species.assign(N, std::vector<double>(S, 0.0));
  rep.H_total.assign(N, 0.0);
  rep.D_total.assign(N, 0.0);
  rep.D_total_stripped.assign(N, 0.0);
  for (int c = 0; c < N; ++c) {
    const CellState& cell = field.cells[c];
    for (int i = 0; i < S; ++i) {
      rep.H[c][i] = entropy_density(spec, cell, i);
      rep.Phi[c][i] = entropy_flux(spec, cell, alpha, i);
      rep.D_species[c][i] = entropy_production_species(spec, cell, alpha, i);
      rep.H_total[c] += rep.H[c][i];
    }
    rep.D_total[c] = entropy_production_total(spec, cell, alpha);
    rep.D_total_stripped[c] = entropy_production_total_stripped(spec, cell);
    rep.int_H += rep.H_total[c];
    rep.int_D += rep.D_total[c];
    rep.int_D_stripped += rep.D_total_stripped[c];
  }
  rep.int_H *= field.dx;
  rep.int_D *= field.dx;
  rep.int_D_stripped *= field.dx;
  return rep;
}

// Discrete residual of the entropy balance law between consecutive frames,
// in the alpha-stripped form dH/dt + d/dx(sum_i H_i u_i) - D/alpha^2 whose
// terms stay finite in the diffusion limit. Forward differences in time;
// the flux divergence reuses the solver's upwind interface convention, so
// the residual isolates closure/modeling error rather than a discretization
// mismatch. When alpha > 0 the raw balance-law residual is alpha times the
// stripped one and is reported alongside.
struct BalanceResidualReport {
  std::vector<std::vector<double>> residual;  // [interval][cell], stripped form
  std::vector<double> interval_max;           // per interval
  std::vector<double> integral_defect;        // |d/dt int H - int D/alpha^2| per interval
  double max_residual = 0.0;
  double max_integral_defect = 0.0;
  double max_raw_residual = 0.0;  // alpha * stripped, meaningful when alpha > 0
};

inline BalanceResidualReport entropy_balance_residual(const std::vector<Frame>& frames,
                                                      const MixtureSpec& spec, double alpha) {
  require(frames.size() >= 2, "balance residual needs at least two frames");
  const Field1D& first = frames.front().field;
  for (const Frame& fr : frames) {
    require(fr.field.size() == first.size(), "balance residual: mismatched grids between frames");
    require(fr.field.dx == first.dx, "balance residual: mismatched cell widths between frames");
  }

  const int N = first.size();
  const int S = spec.species();
  BalanceResidualReport rep;
  rep.residual.reserve(frames.size() - 1);

  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const Field1D& cur = frames[k].field;
    const Field1D& nxt = frames[k + 1].field;
    const double dt = frames[k + 1].t - frames[k].t;
    require(dt > 0.0, "balance residual: frames must be strictly ordered in time");

    // Interface entropy fluxes, upwinded like the solver's mass fluxes.
    std::vector<double> flux(N + 1, 0.0);
    for (int f = 0; f <= N; ++f) {
      int cl, cr;
      bool active;
      detail::face_cells(f, N, cur.boundary, cl, cr, active);
      if (!active) continue;
      double phi = 0.0;
      for (int i = 0; i < S; ++i) {
        const double uhat = 0.5 * (cur.cells[cl].vel[i][0] + cur.cells[cr].vel[i][0]);
        const double h_up = detail::upwind_value(entropy_density(spec, cur.cells[cl], i),
                                                 entropy_density(spec, cur.cells[cr], i), uhat);
        phi += h_up * uhat;
      }
      flux[f] = phi;
    }

    std::vector<double> r(N, 0.0);
    double interval_max = 0.0;
    double dH_integral = 0.0, production_integral = 0.0;
    for (int c = 0; c < N; ++c) {
      double h_cur = 0.0, h_nxt = 0.0;
      for (int i = 0; i < S; ++i) {
        h_cur += entropy_density(spec, cur.cells[c], i);
        h_nxt += entropy_density(spec, nxt.cells[c], i);
      }
      const double production = entropy_production_total_stripped(spec, cur.cells[c]);
      r[c] = (h_nxt - h_cur) / dt + (flux[c + 1] - flux[c]) / cur.dx - production;
      interval_max = std::max(interval_max, std::fabs(r[c]));
      dH_integral += (h_nxt - h_cur) * cur.dx;
      production_integral += production * cur.dx;
    }
    rep.residual.push_back(std::move(r));
    rep.interval_max.push_back(interval_max);
    rep.integral_defect.push_back(std::fabs(dH_integral / dt - production_integral));
    rep.max_residual = std::max(rep.max_residual, interval_max);
    rep.max_integral_defect = std::max(rep.max_integral_defect, rep.integral_defect.back());
  }
  rep.max_raw_residual = alpha * rep.max_residual;
  return rep;
}

// Relative drifts of the discretely conserved quantities over a run.
struct ConservationReport {
  std::vector<double> mass_drift;        // per species, relative to the initial mass
  double energy_drift = 0.0;             // relative to the initial total energy
  double pressure_uniformity = 0.0;      // max over frames of max_c |sum rho T - P0| / P0
  double pre_projection_residual = 0.0;  // max reported stepper projection magnitude
};

inline double total_energy(const Field1D& field, const MixtureSpec& spec, const SolverConfig& cfg) {
  double e = 0.0;
  const double a2 = cfg.alpha * cfg.alpha;
  for (const CellState& cell : field.cells)
    for (int i = 0; i < spec.species(); ++i)
      e += a2 * 0.5 * cell.rho[i] * norm2(cell.vel[i]) +
           energy_factor(spec, cfg, i) * 1.5 * cell.rho[i] * cell.T;
  return e * field.dx;
}

inline std::vector<double> species_masses(const Field1D& field) {
  const int S = field.cells.front().species();
  std::vector<double> m(S, 0.0);
  for (const CellState& cell : field.cells)
    for (int i = 0; i < S; ++i) m[i] += cell.rho[i];
  for (double& v : m) v *= field.dx;
  return m;
}

inline ConservationReport conservation_audit(const std::vector<Frame>& frames,
                                             const MixtureSpec& spec, const SolverConfig& cfg) {
  require(!frames.empty(), "conservation audit needs at least one frame");
  const std::vector<double> mass0 = species_masses(frames.front().field);
  const double energy0 = total_energy(frames.front().field, spec, cfg);
  const int S = spec.species();

  ConservationReport rep;
  rep.mass_drift.assign(S, 0.0);
  for (const Frame& fr : frames) {
    const std::vector<double> m = species_masses(fr.field);
    for (int i = 0; i < S; ++i)
      rep.mass_drift[i] = std::max(rep.mass_drift[i], std::fabs(m[i] - mass0[i]) / std::fabs(mass0[i]));
    const double e = total_energy(fr.field, spec, cfg);
    rep.energy_drift = std::max(rep.energy_drift, std::fabs(e - energy0) / std::fabs(energy0));
    for (const CellState& cell : fr.field.cells) {
      double p = 0.0;
      for (int i = 0; i < S; ++i) p += cell.rho[i];
      p *= cell.T;
      rep.pressure_uniformity =
          std::max(rep.pressure_uniformity, std::fabs(p - fr.field.P0) / fr.field.P0);
    }
    rep.pre_projection_residual = std::max(rep.pre_projection_residual, fr.pressure_residual);
  }
  return rep;
}

// Relaxation study: distance between the scaled-system solution and the
// diffusion-limit reference at t_end, for a decreasing list of alpha values.
struct ConvergenceRow {
  double alpha = 0.0;
  double err_rho = 0.0;
  double err_vel = 0.0;
  double err_total = 0.0;
  double ratio_to_previous = 0.0;  // err(previous alpha) / err(alpha), 0 for the first row
};

inline std::vector<ConvergenceRow> convergence_study(const Field1D& initial, const MixtureSpec& spec,
                                                     const SolverConfig& cfg,
                                                     const std::vector<double>& alphas) {
  require(!alphas.empty(), "convergence study needs at least one alpha");
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    require(alphas[k] > 0.0, "convergence study alphas must be positive");
    if (k > 0)
      require(alphas[k] <= alphas[k - 1], "convergence study alphas must be nonincreasing");
  }

  SolverConfig limit_cfg = cfg;
  limit_cfg.alpha = 0.0;
  const SimulationResult reference = run_simulation(initial, spec, limit_cfg, 0.0);
  const Field1D& ref = reference.frames.back().field;

  // Well-prepared initial data: start the scaled runs from the limit
  // velocities so no initial layer pollutes the comparison.
  Field1D prepared = initial;
  diagnose_limit_velocities(prepared, spec, limit_cfg);

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    SolverConfig scaled_cfg = cfg;
    scaled_cfg.alpha = alphas[k];
    const SimulationResult run = run_simulation(prepared, spec, scaled_cfg, 0.0);
    const Field1D& fin = run.frames.back().field;

    double err_rho2 = 0.0, err_vel2 = 0.0;
    for (int c = 0; c < ref.size(); ++c)
      for (int i = 0; i < spec.species(); ++i) {
        const double dr = fin.cells[c].rho[i] - ref.cells[c].rho[i];
        const double du = fin.cells[c].vel[i][0] - ref.cells[c].vel[i][0];
        err_rho2 += dr * dr;
        err_vel2 += du * du;
      }
    ConvergenceRow row;
    row.alpha = alphas[k];
    row.err_rho = std::sqrt(err_rho2 * ref.dx);
    row.err_vel = std::sqrt(err_vel2 * ref.dx);
    row.err_total = std::sqrt((err_rho2 + err_vel2) * ref.dx);
    row.ratio_to_previous = rows.empty() ? 0.0 : rows.back().err_total / row.err_total;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace msdiff
