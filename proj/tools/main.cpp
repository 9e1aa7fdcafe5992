// msdiff command-line driver: multicomponent diffusion scenarios, the
// maximum-entropy closure check, the Monte Carlo collision oracle, the
// relaxation (alpha -> 0) study and the entropy-balance audit.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msdiff/config.hpp"
#include "msdiff/runner.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t samples = 0;
  bool samples_set = false;
  int threads = 1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value with [sections])")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config and MSDIFF_OUT_DIR)");
  cmd->add_option("--seed", args.seed, "random seed override")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--samples", args.samples, "Monte Carlo sample count override")
      ->each([&](const std::string&) { args.samples_set = true; });
  cmd->add_option("--threads", args.threads, "worker threads for the Monte Carlo oracle")
      ->check(CLI::Range(1, 1024));
  cmd->add_flag("--quiet", args.quiet, "suppress informational logging");
}

msdiff::RunOptions to_options(const CliArgs& args) {
  msdiff::RunOptions opts;
  if (!args.out_dir.empty()) opts.out_dir = args.out_dir;
  if (args.seed_set) opts.seed = args.seed;
  if (args.samples_set) opts.samples = args.samples;
  opts.threads = args.threads;
  opts.quiet = args.quiet;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msdiff: non-isothermal multicomponent diffusion from kinetic moment closures"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* simulate = app.add_subcommand("simulate", "advance a scenario and write field/diagnostic CSV");
  CLI::App* mep = app.add_subcommand("mep-check", "compare the dual Newton closure against the closed form");
  CLI::App* oracle = app.add_subcommand("collision-oracle", "Monte Carlo weak-form collision integrals");
  CLI::App* relax = app.add_subcommand("relaxation-study", "scaled-system convergence to the diffusion limit");
  CLI::App* audit = app.add_subcommand("entropy-audit", "entropy balance residuals and monotonicity");
  for (CLI::App* cmd : {simulate, mep, oracle, relax, audit}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    const msdiff::RunConfig cfg = msdiff::load_config(args.config_path);
    const msdiff::RunOptions opts = to_options(args);
    if (!args.quiet)
      for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

    msdiff::CommandResult result;
    std::string name;
    if (simulate->parsed()) {
      name = "simulate";
      result = msdiff::run_simulate(cfg, opts);
    } else if (mep->parsed()) {
      name = "mep-check";
      result = msdiff::run_mep_check(cfg, opts);
    } else if (oracle->parsed()) {
      name = "collision-oracle";
      result = msdiff::run_collision_oracle(cfg, opts);
    } else if (relax->parsed()) {
      name = "relaxation-study";
      result = msdiff::run_relaxation_study(cfg, opts);
    } else {
      name = "entropy-audit";
      result = msdiff::run_entropy_audit(cfg, opts);
    }
    if (!args.quiet) {
      std::cerr << name << ": wrote";
      for (const auto& f : result.files) std::cerr << " " << f.string();
      std::cerr << "\n";
    }
    return 0;
  } catch (const msdiff::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const msdiff::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
