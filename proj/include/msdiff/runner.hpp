#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msdiff/collision.hpp"
#include "msdiff/common.hpp"
#include "msdiff/config.hpp"
#include "msdiff/csv_io.hpp"
#include "msdiff/diagnostics.hpp"
#include "msdiff/maxwellian.hpp"
#include "msdiff/mc_oracle.hpp"
#include "msdiff/mep.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/random_states.hpp"
#include "msdiff/solver.hpp"

namespace msdiff {

constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  int threads = 1;
  bool quiet = false;
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  double summary = 0.0;  // command-specific headline number (max discrepancy, max |z|, ...)
};

namespace detail {

inline std::filesystem::path resolve_out_dir(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  if (const char* env = std::getenv("MSDIFF_OUT_DIR")) return env;
  return cfg.out_dir;
}

// Removes the files a failed command already created.
class OutputGuard {
 public:
  void track(const std::filesystem::path& p) { files_.push_back(p); }
  void commit() { committed_ = true; }
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : files_) {
      std::filesystem::remove(p, ec);
      std::filesystem::remove(std::filesystem::path(p).replace_extension(".dat"), ec);
    }
  }
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg,
                           const std::string& command, std::uint64_t seed, int threads,
                           double wall_seconds, const std::vector<std::filesystem::path>& files,
                           const std::vector<std::string>& notes) {
  std::ofstream out(dir / "manifest.txt");
  if (!out) throw validation_error("cannot open manifest file in '" + dir.string() + "'");
  out << "msdiff run manifest\n";
  out << "version: " << kVersion << "\n";
  out << "command: " << command << "\n";
  out << "config_hash: " << hex16(fnv1a64(cfg.raw_text)) << "\n";
  out << "seed: " << seed << "\n";
  out << "threads: " << threads << "\n";
  out << "wall_time_s: " << wall_seconds << "\n";
  out << "outputs:";
  for (const auto& f : files) out << " " << f.filename().string();
  out << "\n";
  for (const std::string& w : cfg.warnings) out << "warning: " << w << "\n";
  for (const std::string& n : notes) out << "note: " << n << "\n";
  out << "--- config echo ---\n" << cfg.raw_text;
}

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Builds the initial field and, for scaled runs with initial.velocity=limit,
// prepares the species velocities from the diffusion-limit friction solve.
inline Field1D prepare_initial_field(const RunConfig& cfg) {
  Field1D field = build_initial_field(cfg);
  if (cfg.solver.alpha > 0.0 && cfg.init_velocity == InitialVelocity::Limit) {
    SolverConfig limit_cfg = cfg.solver;
    limit_cfg.alpha = 0.0;
    diagnose_limit_velocities(field, cfg.mixture, limit_cfg);
  }
  return field;
}

// simulate: advance the configured scenario and emit fields.csv plus
// diagnostics.csv (entropy, production, conservation and residual columns).
inline CommandResult run_simulate(const RunConfig& cfg, const RunOptions& opts) {
  detail::WallClock clock;
  const std::filesystem::path dir = detail::resolve_out_dir(cfg, opts);
  std::filesystem::create_directories(dir);
  detail::OutputGuard guard;

  const Field1D initial = prepare_initial_field(cfg);
  const SimulationResult sim = run_simulation(initial, cfg.mixture, cfg.solver, cfg.frame_interval);
  if (sim.floored_cells > 0 && !opts.quiet)
    std::cerr << "warning: density floor applied in " << sim.floored_cells << " cell updates\n";

  const int S = cfg.mixture.species();
  const std::uint64_t hash = fnv1a64(cfg.raw_text);

  std::vector<std::string> field_cols{"t", "x"};
  for (int i = 0; i < S; ++i) field_cols.push_back("rho_" + std::to_string(i + 1));
  for (int i = 0; i < S; ++i) field_cols.push_back("u_" + std::to_string(i + 1));
  field_cols.push_back("T");
  guard.track(dir / "fields.csv");
  {
    TableWriter w(dir / "fields.csv", hash, "dimensionless (diffusive scaling)", field_cols);
    for (const Frame& fr : sim.frames)
      for (int c = 0; c < fr.field.size(); ++c) {
        std::vector<double> row{fr.t, (c + 0.5) * fr.field.dx};
        for (int i = 0; i < S; ++i) row.push_back(fr.field.cells[c].rho[i]);
        for (int i = 0; i < S; ++i) row.push_back(fr.field.cells[c].vel[i][0]);
        row.push_back(fr.field.cells[c].T);
        w.row(row);
      }
  }

  std::vector<std::string> diag_cols{"t", "int_H", "int_D"};
  for (int i = 0; i < S; ++i) diag_cols.push_back("mass_" + std::to_string(i + 1));
  diag_cols.push_back("energy");
  diag_cols.push_back("pressure_residual");
  diag_cols.push_back("balance_residual_max");
  guard.track(dir / "diagnostics.csv");
  {
    TableWriter w(dir / "diagnostics.csv",
                  hash, "dimensionless; int_D is the alpha-stripped production integral",
                  diag_cols);
    for (std::size_t k = 0; k < sim.frames.size(); ++k) {
      const Frame& fr = sim.frames[k];
      const EntropyReport rep = entropy_report(fr.field, cfg.mixture, cfg.solver.alpha);
      double balance = 0.0;
      if (k > 0) {
        const std::vector<Frame> pair{sim.frames[k - 1], sim.frames[k]};
        balance = entropy_balance_residual(pair, cfg.mixture, cfg.solver.alpha).max_residual;
      }
      std::vector<double> row{fr.t, rep.int_H, rep.int_D_stripped};
      for (double m : species_masses(fr.field)) row.push_back(m);
      row.push_back(total_energy(fr.field, cfg.mixture, cfg.solver));
      row.push_back(fr.pressure_residual);
      row.push_back(balance);
      w.row(row);
    }
  }

  std::vector<std::string> notes;
  notes.push_back("steps: " + std::to_string(sim.steps));
  notes.push_back("min_entropy_step_increment: " + format_g17(sim.min_entropy_increment));
  notes.push_back("max_pressure_residual: " + format_g17(sim.max_pressure_residual));
  detail::write_manifest(dir, cfg, "simulate", opts.seed.value_or(0), opts.threads, clock.seconds(),
                         guard.files(), notes);
  CommandResult res;
  res.files = guard.files();
  res.summary = sim.min_entropy_increment;
  guard.commit();
  return res;
}

// mep-check: randomized comparison of the Newton dual solve against the
// closed-form multipliers.
inline CommandResult run_mep_check(const RunConfig& cfg, const RunOptions& opts) {
  detail::WallClock clock;
  const std::filesystem::path dir = detail::resolve_out_dir(cfg, opts);
  std::filesystem::create_directories(dir);
  detail::OutputGuard guard;

  const std::uint64_t seed = opts.seed.value_or(cfg.mep_seed);
  double max_disc = 0.0;
  guard.track(dir / "mep_check.csv");
  {
    TableWriter w(dir / "mep_check.csv", fnv1a64(cfg.raw_text), "dimensionless",
                  {"state_id", "species_count", "alpha", "species", "discrepancy"});
    for (int id = 0; id < cfg.mep_states; ++id) {
      const int S = pick_species_count(seed, static_cast<std::uint64_t>(id));
      const MixtureSpec spec = random_mixture(seed, static_cast<std::uint64_t>(id), S);
      const CellState state = random_state(seed, static_cast<std::uint64_t>(id), S);
      const double alpha = pick_alpha(seed, static_cast<std::uint64_t>(id));
      const Multipliers closed = multipliers_closed_form(spec, state, alpha);
      for (int i = 0; i < S; ++i) {
        const SpeciesMoments targets = maxwellian_moments(spec, state, alpha, i);
        const SpeciesMultipliers dual = solve_dual(targets, spec, i);
        double scale = std::fabs(closed[i].lambda0);
        scale = std::max(scale, std::fabs(closed[i].lambda2));
        for (int k = 0; k < 3; ++k) scale = std::max(scale, std::fabs(closed[i].lambda1[k]));
        scale = std::max(scale, 1.0);
        double disc = std::fabs(dual.lambda0 - closed[i].lambda0);
        disc = std::max(disc, std::fabs(dual.lambda2 - closed[i].lambda2));
        for (int k = 0; k < 3; ++k)
          disc = std::max(disc, std::fabs(dual.lambda1[k] - closed[i].lambda1[k]));
        disc /= scale;
        max_disc = std::max(max_disc, disc);
        w.row({static_cast<double>(id), static_cast<double>(S), alpha, static_cast<double>(i + 1),
               disc});
      }
    }
  }

  detail::write_manifest(dir, cfg, "mep-check", seed, opts.threads, clock.seconds(), guard.files(),
                         {"max_discrepancy: " + format_g17(max_disc)});
  CommandResult res;
  res.files = guard.files();
  res.summary = max_disc;
  guard.commit();
  return res;
}

// collision-oracle: Monte Carlo weak-form integrals against the closed-form
// exchange terms and the vanishing mono-species/number-conservation integrals.
inline CommandResult run_collision_oracle(const RunConfig& cfg, const RunOptions& opts) {
  detail::WallClock clock;
  const std::filesystem::path dir = detail::resolve_out_dir(cfg, opts);
  std::filesystem::create_directories(dir);
  detail::OutputGuard guard;

  const std::uint64_t seed = opts.seed.value_or(cfg.oracle_seed);
  const std::int64_t n = opts.samples.value_or(cfg.oracle_samples);
  require(n >= 1000, "collision oracle needs at least 1000 samples");

  double max_z = 0.0;
  guard.track(dir / "collision_oracle.csv");
  {
    TableWriter w(dir / "collision_oracle.csv", fnv1a64(cfg.raw_text), "dimensionless",
                  {"set_id", "form", "psi", "component", "estimate", "stderr", "closed_form",
                   "abs_z"});
    double noise_floor = 0.0;  // round-off allowance for exactly-conserved test functions
    auto emit = [&](int id, const std::string& form, const std::string& psi, int comp, double est,
                    double err, double closed) {
      const double dev = std::fabs(est - closed);
      const double z = dev / std::max({err, noise_floor, 1e-300});
      max_z = std::max(max_z, z);
      w.row_mixed({std::to_string(id), form, psi, std::to_string(comp), format_g17(est),
                   format_g17(err), format_g17(closed), format_g17(z)});
    };

    for (int id = 0; id < cfg.oracle_sets; ++id) {
      const MixtureSpec spec = random_mixture(seed, static_cast<std::uint64_t>(id), 2);
      const CellState state = random_state(seed, static_cast<std::uint64_t>(id), 2);
      const double alpha = (counter_hash(seed, static_cast<std::uint64_t>(id), 777) % 2) ? 1.0 : 0.1;
      const std::uint64_t set_seed = counter_hash(seed, static_cast<std::uint64_t>(id), 778);
      noise_floor = 1e-12 * 2.0 * M_PI * spec.kernel_norm(0, 1) * state.rho[0] * state.rho[1] *
                    (1.0 + 6.0 * state.T);

      OracleEstimate e = mc_weak_form(spec, state, alpha, 0, 1, WeakFormPsi::SpeedSquared, n,
                                      set_seed, opts.threads);
      emit(id, "bi", "speed-squared", 0, e.mean[0], e.stderr_[0],
           energy_exchange_rate(spec, state, alpha, 0, 1));

      OracleEstimate f = mc_weak_form(spec, state, alpha, 0, 1, WeakFormPsi::Velocity, n,
                                      set_seed + 1, opts.threads);
      const Vec3 closed_f = velocity_exchange_integral(spec, state, alpha, 0, 1);
      for (int k = 0; k < 3; ++k) emit(id, "bi", "velocity", k, f.mean[k], f.stderr_[k], closed_f[k]);

      OracleEstimate g = mc_weak_form(spec, state, alpha, 0, 1, WeakFormPsi::Unit, n, set_seed + 2,
                                      opts.threads);
      emit(id, "bi", "unit", 0, g.mean[0], g.stderr_[0], 0.0);

      OracleEstimate a = mc_weak_form(spec, state, alpha, 0, 0, WeakFormPsi::SpeedSquared, n,
                                      set_seed + 3, opts.threads);
      emit(id, "mono", "speed-squared", 0, a.mean[0], a.stderr_[0], 0.0);

      OracleEstimate b = mc_weak_form(spec, state, alpha, 0, 0, WeakFormPsi::Velocity, n,
                                      set_seed + 4, opts.threads);
      for (int k = 0; k < 3; ++k) emit(id, "mono", "velocity", k, b.mean[k], b.stderr_[k], 0.0);

      OracleEstimate h = mc_weak_form(spec, state, alpha, 0, 0, WeakFormPsi::Unit, n, set_seed + 5,
                                      opts.threads);
      emit(id, "mono", "unit", 0, h.mean[0], h.stderr_[0], 0.0);
    }
  }

  detail::write_manifest(dir, cfg, "collision-oracle", seed, opts.threads, clock.seconds(),
                         guard.files(), {"samples: " + std::to_string(n),
                                         "max_abs_z: " + format_g17(max_z)});
  CommandResult res;
  res.files = guard.files();
  res.summary = max_z;
  guard.commit();
  return res;
}

// relaxation-study: distance of the scaled system to the diffusion limit for
// a decreasing alpha sequence.
inline CommandResult run_relaxation_study(const RunConfig& cfg, const RunOptions& opts) {
  detail::WallClock clock;
  require(!cfg.study_alphas.empty(), "relaxation study needs study.alphas in the config");
  const std::filesystem::path dir = detail::resolve_out_dir(cfg, opts);
  std::filesystem::create_directories(dir);
  detail::OutputGuard guard;

  const Field1D initial = build_initial_field(cfg);
  const std::vector<ConvergenceRow> rows =
      convergence_study(initial, cfg.mixture, cfg.solver, cfg.study_alphas);

  guard.track(dir / "relaxation.csv");
  {
    TableWriter w(dir / "relaxation.csv", fnv1a64(cfg.raw_text), "dimensionless",
                  {"alpha", "err_rho", "err_vel", "err_total", "ratio", "order"});
    for (const ConvergenceRow& r : rows)
      w.row({r.alpha, r.err_rho, r.err_vel, r.err_total, r.ratio_to_previous,
             r.ratio_to_previous > 0.0 ? std::log2(r.ratio_to_previous) : 0.0});
  }

  detail::write_manifest(dir, cfg, "relaxation-study", opts.seed.value_or(0), opts.threads,
                         clock.seconds(), guard.files(), {});
  CommandResult res;
  res.files = guard.files();
  res.summary = rows.back().err_total;
  guard.commit();
  return res;
}

// entropy-audit: run the scenario and report the balance-law residuals, the
// integrated identity defect and the discrete entropy monotonicity.
inline CommandResult run_entropy_audit(const RunConfig& cfg, const RunOptions& opts) {
  detail::WallClock clock;
  const std::filesystem::path dir = detail::resolve_out_dir(cfg, opts);
  std::filesystem::create_directories(dir);
  detail::OutputGuard guard;

  const Field1D initial = prepare_initial_field(cfg);
  const SimulationResult sim = run_simulation(initial, cfg.mixture, cfg.solver, cfg.frame_interval);
  require(sim.frames.size() >= 2, "entropy audit needs t_end > 0 and at least two frames");
  const BalanceResidualReport rep = entropy_balance_residual(sim.frames, cfg.mixture, cfg.solver.alpha);

  guard.track(dir / "entropy_audit.csv");
  {
    TableWriter w(dir / "entropy_audit.csv", fnv1a64(cfg.raw_text), "dimensionless",
                  {"t_start", "t_end", "residual_max", "raw_residual_max", "integral_defect",
                   "entropy_change"});
    for (std::size_t k = 0; k + 1 < sim.frames.size(); ++k) {
      const double h0 = entropy_integral(sim.frames[k].field, cfg.mixture);
      const double h1 = entropy_integral(sim.frames[k + 1].field, cfg.mixture);
      w.row({sim.frames[k].t, sim.frames[k + 1].t, rep.interval_max[k],
             cfg.solver.alpha * rep.interval_max[k], rep.integral_defect[k], h1 - h0});
    }
  }

  detail::write_manifest(dir, cfg, "entropy-audit", opts.seed.value_or(0), opts.threads,
                         clock.seconds(), guard.files(),
                         {"max_residual: " + format_g17(rep.max_residual),
                          "min_entropy_step_increment: " + format_g17(sim.min_entropy_increment)});
  CommandResult res;
  res.files = guard.files();
  res.summary = rep.max_residual;
  guard.commit();
  return res;
}

}  // namespace msdiff
