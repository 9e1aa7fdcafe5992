#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msdiff/common.hpp"
#include "msdiff/friction.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/scaling.hpp"
#include "msdiff/solver.hpp"

namespace msdiff {

// Initial per-species density profile over [0, L].
struct Profile {
  enum class Kind { Uniform, Sine, Step } kind = Kind::Uniform;
  double base = 1.0;   // uniform value / sine baseline / step left value
  double amp = 0.0;    // sine amplitude / step right value
  double mode = 1.0;   // sine mode count
  double split = 0.5;  // step position as a fraction of the domain

  double eval(double x, double L) const {
    switch (kind) {
      case Kind::Uniform:
        return base;
      case Kind::Sine:
        return base + amp * std::sin(2.0 * M_PI * mode * x / L);
      case Kind::Step:
        return (x < split * L) ? base : amp;
    }
    return base;
  }
};

enum class InitialVelocity { Limit, Zero };

struct RunConfig {
  MixtureSpec mixture;
  ScalingConfig scaling;

  double length = 1.0;
  int cells = 64;
  BoundaryKind boundary = BoundaryKind::Periodic;

  std::vector<Profile> rho_profiles;
  std::optional<double> temperature;  // uniform initial temperature
  std::optional<double> pressure;     // or uniform pressure P0 with T = P0 / n(x)
  InitialVelocity init_velocity = InitialVelocity::Limit;

  SolverConfig solver;

  std::string out_dir = "out";
  double frame_interval = 0.0;

  std::vector<double> study_alphas;

  std::int64_t oracle_samples = 1000000;
  std::uint64_t oracle_seed = 1;
  int oracle_sets = 20;

  int mep_states = 200;
  std::uint64_t mep_seed = 7;

  std::vector<std::string> warnings;  // e.g. Ma/Kn mismatch from physical scales
  std::string raw_text;               // config echo for hashing and the manifest
};

namespace detail {

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

using ConfigMap = std::map<std::string, ConfigEntry>;  // "section.key" -> entry

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline ConfigMap tokenize_config(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw validation_error("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), "config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(lineno) +
                             ": expected 'key = value' (no '=' found)");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw validation_error("config line " + std::to_string(lineno) + ": empty key or value");
    if (section.empty())
      throw validation_error("config line " + std::to_string(lineno) +
                             ": key outside of any [section]");
    const std::string full = section + "." + key;
    if (map.count(full))
      throw validation_error("config line " + std::to_string(lineno) + ": duplicate key '" + full +
                             "' (first at line " + std::to_string(map[full].line) + ")");
    map[full] = ConfigEntry{value, lineno, false};
  }
  return map;
}

inline double parse_double(const ConfigEntry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw validation_error("config line " + std::to_string(e.line) + ": key '" + key +
                           "' is not a number: '" + e.value + "'");
  }
}

inline long long parse_int(const ConfigEntry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw validation_error("config line " + std::to_string(e.line) + ": key '" + key +
                           "' is not an integer: '" + e.value + "'");
  }
}

inline bool parse_bool(const ConfigEntry& e, const std::string& key) {
  std::string v = e.value;
  for (char& c : v) c = static_cast<char>(std::tolower(c));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw validation_error("config line " + std::to_string(e.line) + ": key '" + key +
                         "' is not a boolean: '" + e.value + "'");
}

inline std::vector<std::string> split_tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

class ConfigReader {
 public:
  explicit ConfigReader(ConfigMap& map) : map_(map) {}

  bool has(const std::string& key) const { return map_.count(key) > 0; }
  const ConfigEntry* find(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  const ConfigEntry& get(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) throw validation_error("config: missing required key '" + key + "'");
    return *e;
  }
  double number(const std::string& key) { return parse_double(get(key), key); }
  std::optional<double> number_opt(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    return parse_double(*e, key);
  }
  long long integer(const std::string& key) { return parse_int(get(key), key); }
  std::optional<long long> integer_opt(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    return parse_int(*e, key);
  }
  std::optional<bool> boolean_opt(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    return parse_bool(*e, key);
  }
  std::optional<std::string> string_opt(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : map_)
      if (!entry.used)
        throw validation_error("config line " + std::to_string(entry.line) + ": unknown key '" + key +
                               "'");
  }

 private:
  ConfigMap& map_;
};

inline Profile parse_profile(const ConfigEntry& e, const std::string& key) {
  const std::vector<std::string> tok = split_tokens(e.value);
  auto num = [&](std::size_t idx) {
    try {
      return std::stod(tok.at(idx));
    } catch (const std::exception&) {
      throw validation_error("config line " + std::to_string(e.line) + ": bad profile parameter in '" +
                             key + "'");
    }
  };
  Profile p;
  if (tok.empty()) throw validation_error("config line " + std::to_string(e.line) + ": empty profile");
  if (tok[0] == "uniform") {
    require(tok.size() == 2, "config line " + std::to_string(e.line) + ": uniform profile takes VALUE");
    p.kind = Profile::Kind::Uniform;
    p.base = num(1);
    require(p.base > 0.0, "config line " + std::to_string(e.line) + ": density must be positive");
  } else if (tok[0] == "sine") {
    require(tok.size() == 4,
            "config line " + std::to_string(e.line) + ": sine profile takes BASE AMP MODE");
    p.kind = Profile::Kind::Sine;
    p.base = num(1);
    p.amp = num(2);
    p.mode = num(3);
    require(p.base - std::fabs(p.amp) > 0.0,
            "config line " + std::to_string(e.line) + ": sine profile dips to a nonpositive density");
    require(p.mode == std::floor(p.mode) && p.mode >= 1.0,
            "config line " + std::to_string(e.line) + ": sine mode must be a positive integer");
  } else if (tok[0] == "step") {
    require(tok.size() == 3 || tok.size() == 4,
            "config line " + std::to_string(e.line) + ": step profile takes LEFT RIGHT [SPLIT]");
    p.kind = Profile::Kind::Step;
    p.base = num(1);
    p.amp = num(2);
    p.split = tok.size() == 4 ? num(3) : 0.5;
    require(p.base > 0.0 && p.amp > 0.0,
            "config line " + std::to_string(e.line) + ": step densities must be positive");
    require(p.split > 0.0 && p.split < 1.0,
            "config line " + std::to_string(e.line) + ": step split must lie in (0,1)");
  } else {
    throw validation_error("config line " + std::to_string(e.line) + ": unknown profile kind '" +
                           tok[0] + "' (expected uniform | sine | step)");
  }
  return p;
}

}  // namespace detail

// Parses the line-oriented `key = value` configuration with [section]
// headers. Unknown keys are rejected with their line numbers; all range and
// symmetry violations carry distinct messages.
inline RunConfig parse_config(const std::string& text) {
  detail::ConfigMap map = detail::tokenize_config(text);
  detail::ConfigReader r(map);
  RunConfig cfg;
  cfg.raw_text = text;

  // [mixture]
  const long long S_ll = r.integer("mixture.species");
  require(S_ll >= 2 && S_ll <= 64, "mixture.species must be between 2 and 64");
  const int S = static_cast<int>(S_ll);
  cfg.mixture.mass.resize(S);
  for (int i = 0; i < S; ++i) {
    const std::string key = "mixture.mass_" + std::to_string(i + 1);
    cfg.mixture.mass[i] = r.number(key);
    require(cfg.mixture.mass[i] > 0.0, "config: " + key + " must be positive");
  }
  cfg.mixture.kernel_norms.assign(static_cast<std::size_t>(S) * S, 0.0);
  for (int i = 0; i < S; ++i)
    for (int j = i; j < S; ++j) {
      const std::string kij = "mixture.k_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      const std::string kji = "mixture.k_" + std::to_string(j + 1) + "_" + std::to_string(i + 1);
      const detail::ConfigEntry* eij = r.find(kij);
      const detail::ConfigEntry* eji = (i == j) ? nullptr : r.find(kji);
      std::optional<double> vij, vji;
      if (eij) vij = detail::parse_double(*eij, kij);
      if (eji) vji = detail::parse_double(*eji, kji);
      if (vij && vji && *vij != *vji)
        throw validation_error("config: kernel norms " + kij + " and " + kji +
                               " disagree; the kernel matrix must be symmetric");
      double v;
      if (vij)
        v = *vij;
      else if (vji)
        v = *vji;
      else if (i == j)
        v = 0.0;  // self-kernel defaults to zero (only the Monte Carlo oracle uses it)
      else
        throw validation_error("config: missing kernel norm " + kij);
      require(v >= 0.0, "config: kernel norm " + kij + " must be nonnegative");
      if (i != j) require(v > 0.0, "config: kernel norm " + kij + " must be positive");
      cfg.mixture.kernel_norm_ref(i, j) = v;
      cfg.mixture.kernel_norm_ref(j, i) = v;
    }
  for (int i = 0; i < S; ++i) {
    const auto b = r.number_opt("mixture.b_" + std::to_string(i + 1));
    if (b) {
      if (cfg.mixture.log_norm_b.empty()) cfg.mixture.log_norm_b.assign(S, 1.0);
      require(*b > 0.0, "config: mixture.b_" + std::to_string(i + 1) + " must be positive");
      cfg.mixture.log_norm_b[i] = *b;
    }
  }

  // [scaling]: either an explicit alpha or the five physical reference scales.
  const auto alpha = r.number_opt("scaling.alpha");
  const bool has_physical = r.has("scaling.tau") || r.has("scaling.l_ref") || r.has("scaling.t0") ||
                            r.has("scaling.n_ref") || r.has("scaling.r_ref");
  if (alpha && has_physical)
    throw validation_error("config: give either scaling.alpha or the physical reference scales, not both");
  if (alpha) {
    require(*alpha >= 0.0, "config: scaling.alpha must be nonnegative");
    cfg.scaling.alpha = *alpha;
    const auto m0 = r.number_opt("mixture.m0");
    if (m0) {
      require(*m0 > 0.0, "config: mixture.m0 must be positive");
      cfg.mixture.m0 = *m0;
    } else {
      double sum = 0.0;
      for (double m : cfg.mixture.mass) sum += m;
      cfg.mixture.m0 = sum / S;
    }
  } else if (has_physical) {
    // Masses and kernel norms are read as physical (SI) values and recast:
    // m -> m/mean(m), ||b|| -> ||b|| / (c0 4 pi r^2), alpha = (L/tau)/c0.
    ReferenceScales sc;
    sc.tau = r.number("scaling.tau");
    sc.L = r.number("scaling.l_ref");
    sc.T0 = r.number("scaling.t0");
    sc.N = r.number("scaling.n_ref");
    sc.r = r.number("scaling.r_ref");
    sc.validate();
    if (r.has("mixture.m0"))
      throw validation_error("config: mixture.m0 is not allowed with physical reference scales");
    double m0_kg = 0.0;
    for (double m : cfg.mixture.mass) m0_kg += m;
    m0_kg /= S;
    const double u0 = sc.L / sc.tau;
    const double c0 = sound_speed(sc.T0, m0_kg);
    const double mach = u0 / c0;
    const double knudsen = sc.L * sc.L / (sc.N * 4.0 * M_PI * sc.r * sc.r);
    if (std::fabs(mach - knudsen) > 1e-6 * std::fabs(mach))
      cfg.warnings.push_back("Ma and Kn differ by more than 1e-6 relative (Ma=" + std::to_string(mach) +
                             ", Kn=" + std::to_string(knudsen) + "); the model assumes Ma = Kn");
    cfg.scaling.alpha = mach;
    cfg.scaling.scales = sc;
    for (double& m : cfg.mixture.mass) m /= m0_kg;
    cfg.mixture.m0 = 1.0;
    for (double& k : cfg.mixture.kernel_norms) k /= c0 * 4.0 * M_PI * sc.r * sc.r;
  } else {
    throw validation_error("config: [scaling] needs alpha or the physical reference scales");
  }
  cfg.mixture.validate();
  cfg.scaling.validate();

  // [domain]
  cfg.length = r.number("domain.length");
  require(cfg.length > 0.0, "config: domain.length must be positive");
  const long long cells = r.integer("domain.cells");
  require(cells >= 4 && cells <= 1000000, "config: domain.cells must be between 4 and 1e6");
  cfg.cells = static_cast<int>(cells);
  if (const auto b = r.string_opt("domain.boundary")) {
    if (*b == "periodic")
      cfg.boundary = BoundaryKind::Periodic;
    else if (*b == "no-flux")
      cfg.boundary = BoundaryKind::NoFlux;
    else
      throw validation_error("config: domain.boundary must be 'periodic' or 'no-flux'");
  }

  // [initial]
  cfg.rho_profiles.resize(S);
  for (int i = 0; i < S; ++i) {
    const std::string key = "initial.rho_" + std::to_string(i + 1);
    cfg.rho_profiles[i] = detail::parse_profile(r.get(key), key);
  }
  cfg.temperature = r.number_opt("initial.temperature");
  cfg.pressure = r.number_opt("initial.pressure");
  if (cfg.temperature && cfg.pressure)
    throw validation_error("config: give initial.temperature or initial.pressure, not both");
  if (!cfg.temperature && !cfg.pressure)
    throw validation_error("config: [initial] needs temperature or pressure");
  if (cfg.temperature) require(*cfg.temperature > 0.0, "config: initial.temperature must be positive");
  if (cfg.pressure) require(*cfg.pressure > 0.0, "config: initial.pressure must be positive");
  if (const auto v = r.string_opt("initial.velocity")) {
    if (*v == "limit")
      cfg.init_velocity = InitialVelocity::Limit;
    else if (*v == "zero")
      cfg.init_velocity = InitialVelocity::Zero;
    else
      throw validation_error("config: initial.velocity must be 'limit' or 'zero'");
  }

  // [solver]
  if (const auto c = r.string_opt("solver.closure")) {
    if (*c == "equimolar")
      cfg.solver.closure = Closure::Equimolar;
    else if (*c == "mass-average")
      cfg.solver.closure = Closure::MassAverage;
    else
      throw validation_error("config: solver.closure must be 'equimolar' or 'mass-average'");
  }
  if (const auto v = r.number_opt("solver.cfl_safety")) cfg.solver.cfl_safety = *v;
  if (const auto v = r.number_opt("solver.t_end")) cfg.solver.t_end = *v;
  if (const auto v = r.boolean_opt("solver.energy_mass_factors")) cfg.solver.energy_mass_factors = *v;
  cfg.solver.alpha = cfg.scaling.alpha;
  cfg.solver.validate();

  // [output]
  if (const auto v = r.string_opt("output.directory")) cfg.out_dir = *v;
  if (const auto v = r.number_opt("output.frame_interval")) {
    require(*v >= 0.0, "config: output.frame_interval must be nonnegative");
    cfg.frame_interval = *v;
  }

  // [study]
  if (const auto v = r.string_opt("study.alphas")) {
    for (const std::string& tok : detail::split_tokens(*v)) {
      try {
        cfg.study_alphas.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw validation_error("config: study.alphas contains a non-number: '" + tok + "'");
      }
    }
    require(!cfg.study_alphas.empty(), "config: study.alphas must not be empty");
  }

  // [oracle]
  if (const auto v = r.integer_opt("oracle.samples")) {
    require(*v >= 1000, "config: oracle.samples must be at least 1000");
    cfg.oracle_samples = *v;
  }
  if (const auto v = r.integer_opt("oracle.seed")) cfg.oracle_seed = static_cast<std::uint64_t>(*v);
  if (const auto v = r.integer_opt("oracle.sets")) {
    require(*v >= 1 && *v <= 10000, "config: oracle.sets must be between 1 and 10000");
    cfg.oracle_sets = static_cast<int>(*v);
  }

  // [mep]
  if (const auto v = r.integer_opt("mep.states")) {
    require(*v >= 1 && *v <= 1000000, "config: mep.states must be between 1 and 1e6");
    cfg.mep_states = static_cast<int>(*v);
  }
  if (const auto v = r.integer_opt("mep.seed")) cfg.mep_seed = static_cast<std::uint64_t>(*v);

  r.reject_unused();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Builds the initial field from the configured profiles. With
// initial.temperature the pressure P0 is taken from the (validated, uniform)
// product n(x) T; with initial.pressure the temperature is P0 / n(x).
inline Field1D build_initial_field(const RunConfig& cfg) {
  const int S = cfg.mixture.species();
  Field1D field;
  field.dx = cfg.length / cfg.cells;
  field.boundary = cfg.boundary;
  field.cells.assign(cfg.cells, CellState{});

  for (int c = 0; c < cfg.cells; ++c) {
    const double x = (c + 0.5) * field.dx;
    CellState& cell = field.cells[c];
    cell.rho.resize(S);
    cell.vel.assign(S, kZeroVec);
    double n = 0.0;
    for (int i = 0; i < S; ++i) {
      cell.rho[i] = cfg.rho_profiles[i].eval(x, cfg.length);
      require(cell.rho[i] > 0.0, "initial profile produced a nonpositive density");
      n += cell.rho[i];
    }
    cell.T = cfg.temperature ? *cfg.temperature : (*cfg.pressure / n);
  }

  if (cfg.temperature) {
    double n0 = 0.0;
    for (int i = 0; i < S; ++i) n0 += field.cells.front().rho[i];
    field.P0 = n0 * (*cfg.temperature);
    if (cfg.solver.alpha == 0.0) {
      for (const CellState& cell : field.cells) {
        double n = 0.0;
        for (int i = 0; i < S; ++i) n += cell.rho[i];
        if (std::fabs(n * cell.T - field.P0) > 1e-10 * field.P0)
          throw validation_error(
              "initial data violates the uniform-pressure compatibility of the limit system; "
              "use initial.pressure or a uniform total density");
      }
    }
  } else {
    field.P0 = *cfg.pressure;
  }
  field.validate();
  return field;
}

}  // namespace msdiff
