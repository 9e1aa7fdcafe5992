#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <thread>
#include <vector>

#include "msdiff/common.hpp"
#include "msdiff/maxwellian.hpp"
#include "msdiff/mixture.hpp"
#include "msdiff/rng.hpp"

namespace msdiff {

// Test function of the weak-form collision integral.
enum class WeakFormPsi { Unit, Velocity, SpeedSquared };

// Monte Carlo estimate with standard errors; vector-valued test functions
// fill all three components, scalar ones only component 0.
struct OracleEstimate {
  Vec3 mean{};
  Vec3 stderr_{};
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  int components = 1;
};

namespace detail {

inline Vec3 psi_eval(WeakFormPsi psi, const Vec3& v) {
  switch (psi) {
    case WeakFormPsi::Unit:
      return {1.0, 0.0, 0.0};
    case WeakFormPsi::Velocity:
      return v;
    case WeakFormPsi::SpeedSquared:
      return {norm2(v), 0.0, 0.0};
  }
  return {};
}

// Post-collision velocity pair for masses (mi, mj) and scattering direction sigma:
//   v'  = (mi v + mj v* + mj |v - v*| sigma) / (mi + mj)
//   v*' = (mi v + mj v* - mi |v - v*| sigma) / (mi + mj)
inline void post_collision(double mi, double mj, const Vec3& v, const Vec3& vstar, const Vec3& sigma,
                           Vec3& vprime, Vec3& vstarprime) {
  const double msum = mi + mj;
  const Vec3 center = (1.0 / msum) * (mi * v + mj * vstar);
  const double g = norm(v - vstar);
  vprime = center + (mj * g / msum) * sigma;
  vstarprime = center - (mi * g / msum) * sigma;
}

struct BlockSums {
  Vec3 sum{};
  Vec3 sumsq{};
};

}  // namespace detail

// Monte Carlo evaluation of the weak-form collision integrals with the
// distribution functions taken as the entropy-maximizing Maxwellians and a
// constant even angular kernel b(s) = ||b||/2 on [-1,1] (so the sphere
// integral of the kernel is 2 pi ||b|| and the sigma-weighted one vanishes).
//
// Bi-species (i != j): sample v ~ f_i/rho_i, v* ~ f_j/rho_j, sigma uniform on
// the sphere; weight rho_i rho_j 2 pi ||b_ij|| [psi(v') - psi(v)].
// Mono-species (i == j): the symmetrized quadruple-difference form,
// weight (1/2) rho_i^2 2 pi ||b_i|| [psi(v') + psi(v*') - psi(v) - psi(v*)].
//
// Samples are keyed by (seed, sample index) and accumulated in fixed-size
// blocks combined in index order, so the result is bitwise reproducible for
// any thread count.
inline OracleEstimate mc_weak_form(const MixtureSpec& spec, const CellState& state, double alpha,
                                   int i, int j, WeakFormPsi psi, std::int64_t n,
                                   std::uint64_t seed, int threads = 1) {
  require(n >= 1000, "weak-form oracle needs at least 1000 samples");
  require(i >= 0 && i < spec.species() && j >= 0 && j < spec.species(), "species index out of range");
  require(alpha >= 0.0, "alpha must be nonnegative");

  const bool mono = (i == j);
  const double mi = spec.mass[i], mj = spec.mass[j];
  const Vec3 mean_i = alpha * state.vel[i];
  const Vec3 mean_j = alpha * state.vel[j];
  const double sigma_i = thermal_width(spec, state.T, i);
  const double sigma_j = thermal_width(spec, state.T, j);
  const double kernel_weight = 2.0 * M_PI * spec.kernel_norm(i, j) * state.rho[i] * state.rho[j];
  const int ncomp = (psi == WeakFormPsi::Velocity) ? 3 : 1;

  constexpr std::int64_t kBlock = 4096;
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<detail::BlockSums> blocks(static_cast<std::size_t>(nblocks));

  auto run_block = [&](std::int64_t blk) {
    const std::int64_t begin = blk * kBlock;
    const std::int64_t end = std::min(n, begin + kBlock);
    detail::BlockSums acc;
    for (std::int64_t k = begin; k < end; ++k) {
      const auto ctr = static_cast<std::uint64_t>(k);
      const Vec3 v = normal3(seed, ctr, 0, mean_i, sigma_i);
      const Vec3 vstar = normal3(seed, ctr, 4, mean_j, sigma_j);
      const Vec3 dir = sphere_uniform(seed, ctr, 8);
      Vec3 vprime, vstarprime;
      detail::post_collision(mi, mj, v, vstar, dir, vprime, vstarprime);

      Vec3 contrib;
      if (mono) {
        const Vec3 d = detail::psi_eval(psi, vprime) + detail::psi_eval(psi, vstarprime) -
                       detail::psi_eval(psi, v) - detail::psi_eval(psi, vstar);
        contrib = (0.5 * kernel_weight) * d;
      } else {
        const Vec3 d = detail::psi_eval(psi, vprime) - detail::psi_eval(psi, v);
        contrib = kernel_weight * d;
      }
      for (int c = 0; c < ncomp; ++c) {
        acc.sum[c] += contrib[c];
        acc.sumsq[c] += contrib[c] * contrib[c];
      }
    }
    blocks[static_cast<std::size_t>(blk)] = acc;
  };

  if (threads <= 1) {
    for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(blk);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::int64_t> next(1, 0);
    const int nt = static_cast<int>(std::min<std::int64_t>(threads, nblocks));
    std::mutex mtx;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          std::int64_t blk;
          {
            std::lock_guard<std::mutex> lock(mtx);
            if (next[0] >= nblocks) return;
            blk = next[0]++;
          }
          run_block(blk);
        }
      });
    for (auto& th : pool) th.join();
  }

  Vec3 total{}, totalsq{};
  for (const auto& b : blocks) {
    total += b.sum;
    totalsq += b.sumsq;
  }

  OracleEstimate out;
  out.n_samples = n;
  out.seed = seed;
  out.components = ncomp;
  const double dn = static_cast<double>(n);
  for (int c = 0; c < ncomp; ++c) {
    out.mean[c] = total[c] / dn;
    const double var = std::max(0.0, totalsq[c] / dn - out.mean[c] * out.mean[c]);
    out.stderr_[c] = std::sqrt(var / (dn - 1.0));
  }
  return out;
}

}  // namespace msdiff
