#pragma once

#include <cmath>
#include <cstdint>

#include "msdiff/common.hpp"

namespace msdiff {

// Counter-based pseudorandom stream: every draw is a pure function of
// (seed, counter, lane), so Monte Carlo results do not depend on evaluation
// order or thread count.

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane) {
  std::uint64_t z = seed ^ 0x8000000080008081ull;
  z += 0x9E3779B97F4A7C15ull * (counter + 1);
  z += 0xC2B2AE3D27D4EB4Full * (lane + 0x165667B19E3779F9ull);
  z = mix64(z);
  return mix64(z + seed);
}

// Uniform in the open interval (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane) {
  return (static_cast<double>(counter_hash(seed, counter, lane) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal pair via Box-Muller; lanes `lane` and `lane+1` are consumed.
inline void normal_pair(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane,
                        double& z0, double& z1) {
  const double u1 = uniform01(seed, counter, lane);
  const double u2 = uniform01(seed, counter, lane + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  z0 = r * std::cos(phi);
  z1 = r * std::sin(phi);
}

// Isotropic Gaussian sample with given mean and per-axis standard deviation.
// Consumes lanes lane..lane+3.
inline Vec3 normal3(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane,
                    const Vec3& mean, double sigma) {
  double a, b, c, d;
  normal_pair(seed, counter, lane, a, b);
  normal_pair(seed, counter, lane + 2, c, d);
  (void)d;
  return {mean[0] + sigma * a, mean[1] + sigma * b, mean[2] + sigma * c};
}

// Uniform direction on the unit sphere. Consumes lanes lane..lane+1.
inline Vec3 sphere_uniform(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane) {
  const double z = 1.0 - 2.0 * uniform01(seed, counter, lane);
  const double phi = 2.0 * M_PI * uniform01(seed, counter, lane + 1);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace msdiff
