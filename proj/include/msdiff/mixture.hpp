#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "msdiff/common.hpp"

namespace msdiff {

// Densities are clipped here instead of going nonpositive; a state with all
// species at the floor is treated as degenerate.
constexpr double kDensityFloor = 1e-12;

// Gas mixture description: dimensionless atomic masses, the reference
// (average) mass, and the symmetric matrix of angular collision-kernel norms.
// kernel_norm(i,j) with i != j is the pair norm; kernel_norm(i,i) is the
// self-collision norm.
struct MixtureSpec {
  std::vector<double> mass;          // per species, > 0
  double m0 = 1.0;                   // reference mass, > 0
  std::vector<double> kernel_norms;  // S*S row-major, symmetric, >= 0
  std::vector<double> log_norm_b;    // entropy log-normalization constants, default 1

  int species() const { return static_cast<int>(mass.size()); }

  double kernel_norm(int i, int j) const {
    return kernel_norms[static_cast<std::size_t>(i) * mass.size() + j];
  }
  double& kernel_norm_ref(int i, int j) {
    return kernel_norms[static_cast<std::size_t>(i) * mass.size() + j];
  }
  double b(int i) const { return log_norm_b.empty() ? 1.0 : log_norm_b[i]; }

  void validate() const {
    const int S = species();
    require(S >= 2, "mixture needs at least two species");
    for (int i = 0; i < S; ++i)
      require(mass[i] > 0.0, "species mass must be positive (species " + std::to_string(i + 1) + ")");
    require(m0 > 0.0, "reference mass m0 must be positive");
    require(static_cast<int>(kernel_norms.size()) == S * S, "kernel norm matrix must be S x S");
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j) {
        require(kernel_norm(i, j) >= 0.0, "kernel norms must be nonnegative");
        require(kernel_norm(i, j) == kernel_norm(j, i), "kernel norm matrix must be symmetric");
        if (i != j)
          require(kernel_norm(i, j) > 0.0, "every species pair must interact (zero pair kernel norm)");
      }
    if (!log_norm_b.empty()) {
      require(static_cast<int>(log_norm_b.size()) == S, "log-normalization list must have one entry per species");
      for (double bi : log_norm_b) require(bi > 0.0, "log-normalization constants must be positive");
    }
  }
};

// Builds a spec with m0 defaulting to the arithmetic mean mass.
inline MixtureSpec make_mixture(std::vector<double> masses, std::vector<double> kernel_norms,
                                std::optional<double> m0 = std::nullopt) {
  MixtureSpec spec;
  spec.mass = std::move(masses);
  spec.kernel_norms = std::move(kernel_norms);
  spec.m0 = m0 ? *m0
               : std::accumulate(spec.mass.begin(), spec.mass.end(), 0.0) /
                     static_cast<double>(spec.mass.size());
  spec.validate();
  return spec;
}

struct ReferenceScales {
  double tau = 1.0;  // macroscopic time [s]
  double L = 1.0;    // macroscopic length [m]
  double T0 = 1.0;   // reference temperature [K]
  double N = 1.0;    // particle count in the reference volume
  double r = 1.0;    // effective particle radius [m]

  void validate() const {
    require(tau > 0.0 && L > 0.0 && T0 > 0.0 && N > 0.0 && r > 0.0,
            "reference scales must be strictly positive");
  }
};

struct ScalingConfig {
  double alpha = 0.0;  // Mach = Knudsen = alpha; 0 selects the limit system
  std::optional<ReferenceScales> scales;

  void validate() const {
    require(alpha >= 0.0, "alpha must be nonnegative");
    if (scales) scales->validate();
  }
};

// Macroscopic state of one spatial cell: scaled number densities, species
// velocities and the common temperature.
struct CellState {
  std::vector<double> rho;  // per species, > 0
  std::vector<Vec3> vel;    // per species
  double T = 1.0;

  int species() const { return static_cast<int>(rho.size()); }

  void validate() const {
    require(!rho.empty() && rho.size() == vel.size(), "cell state arrays must match");
    for (double r : rho) require(r > 0.0, "densities must be strictly positive");
    require(T > 0.0, "temperature must be strictly positive");
  }
};

enum class BoundaryKind { Periodic, NoFlux };

// Uniform 1-D grid of cell states. P0 is the spatially uniform pressure
// sum_i rho_i T the limit solver enforces by projection.
struct Field1D {
  std::vector<CellState> cells;
  double dx = 1.0;
  BoundaryKind boundary = BoundaryKind::Periodic;
  double P0 = 1.0;

  int size() const { return static_cast<int>(cells.size()); }
  double length() const { return dx * cells.size(); }

  void validate() const {
    require(!cells.empty(), "field needs at least one cell");
    require(dx > 0.0, "cell width must be positive");
    require(P0 > 0.0, "pressure P0 must be positive");
    const int S = cells.front().species();
    for (const CellState& c : cells) {
      c.validate();
      require(c.species() == S, "all cells must share the species count");
    }
  }
};

}  // namespace msdiff
