#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msdiff/common.hpp"
#include "msdiff/mixture.hpp"

namespace msdiff {

constexpr double kBoltzmann = 1.380649e-23;  // J/K

// Physical description handed to nondimensionalize: SI masses and fields.
struct PhysicalMixture {
  std::vector<double> mass_kg;        // per species
  std::vector<double> kernel_norms;   // S*S, physical angular-kernel L1 norms
  ReferenceScales scales;
  double kB = kBoltzmann;
};

struct PhysicalCell {
  std::vector<double> mass_density;  // kg/m^3 per species
  std::vector<Vec3> velocity;        // m/s per species
  double T = 0.0;                    // K
};

struct PhysicalField {
  std::vector<PhysicalCell> cells;
  double dx = 1.0;  // m
  BoundaryKind boundary = BoundaryKind::Periodic;
};

struct NondimResult {
  MixtureSpec spec;       // masses relative to the mean mass, scaled kernel norms
  ScalingConfig scaling;  // alpha = Ma, with the reference scales attached
  Field1D field;
  double mach = 0.0;
  double knudsen = 0.0;
  std::vector<std::string> warnings;
};

// Speed of sound of a monatomic gas at the reference temperature.
inline double sound_speed(double T0, double m0_kg, double kB = kBoltzmann) {
  return std::sqrt(5.0 * kB * T0 / (3.0 * m0_kg));
}

// Casts a physical configuration into the dimensionless variables used by the
// rest of the library: rho_i -> L^3 rho_i / (m_i N), u -> u/u0, T -> T/T0,
// with alpha = Ma = u0/c0 and Kn = L^2/(4 pi r^2 N). The model assumes
// Ma = Kn; a mismatch beyond 1e-6 relative is reported as a warning.
inline NondimResult nondimensionalize(const PhysicalMixture& mix, const PhysicalField& field) {
  mix.scales.validate();
  require(mix.kB > 0.0, "Boltzmann constant must be positive");
  const int S = static_cast<int>(mix.mass_kg.size());
  require(S >= 2, "mixture needs at least two species");
  for (double m : mix.mass_kg) require(m > 0.0, "physical masses must be positive");
  require(field.dx > 0.0, "cell width must be positive");
  require(!field.cells.empty(), "field needs at least one cell");

  const ReferenceScales& sc = mix.scales;
  double m0_kg = 0.0;
  for (double m : mix.mass_kg) m0_kg += m;
  m0_kg /= S;

  const double u0 = sc.L / sc.tau;
  const double c0 = sound_speed(sc.T0, m0_kg, mix.kB);
  const double mach = u0 / c0;
  const double knudsen = (sc.L * sc.L * sc.L) / (sc.N * 4.0 * M_PI * sc.r * sc.r) / sc.L;

  NondimResult out;
  out.mach = mach;
  out.knudsen = knudsen;
  out.scaling.alpha = mach;
  out.scaling.scales = sc;
  if (std::fabs(mach - knudsen) > 1e-6 * std::fabs(mach))
    out.warnings.push_back("Ma and Kn differ by more than 1e-6 relative (Ma=" + std::to_string(mach) +
                           ", Kn=" + std::to_string(knudsen) + "); the model assumes Ma = Kn");

  out.spec.mass.resize(S);
  for (int i = 0; i < S; ++i) out.spec.mass[i] = mix.mass_kg[i] / m0_kg;
  out.spec.m0 = 1.0;
  // Kernel scaling follows the cross-section scaling B -> B / (c0 4 pi r^2).
  out.spec.kernel_norms.resize(static_cast<std::size_t>(S) * S);
  require(mix.kernel_norms.size() == out.spec.kernel_norms.size(), "kernel norm matrix must be S x S");
  for (std::size_t k = 0; k < mix.kernel_norms.size(); ++k)
    out.spec.kernel_norms[k] = mix.kernel_norms[k] / (c0 * 4.0 * M_PI * sc.r * sc.r);
  out.spec.validate();

  const double L3 = sc.L * sc.L * sc.L;
  out.field.dx = field.dx / sc.L;
  out.field.boundary = field.boundary;
  out.field.cells.resize(field.cells.size());
  for (std::size_t c = 0; c < field.cells.size(); ++c) {
    const PhysicalCell& pc = field.cells[c];
    require(static_cast<int>(pc.mass_density.size()) == S && pc.velocity.size() == pc.mass_density.size(),
            "physical cell arrays must match the species count");
    CellState& cell = out.field.cells[c];
    cell.rho.resize(S);
    cell.vel.resize(S);
    for (int i = 0; i < S; ++i) {
      cell.rho[i] = L3 * pc.mass_density[i] / (mix.mass_kg[i] * sc.N);
      cell.vel[i] = (1.0 / u0) * pc.velocity[i];
    }
    cell.T = pc.T / sc.T0;
    cell.validate();
  }
  double P = 0.0;
  for (int i = 0; i < S; ++i) P += out.field.cells.front().rho[i];
  out.field.P0 = P * out.field.cells.front().T;
  out.field.validate();
  return out;
}

}  // namespace msdiff
