// Discretized Ohmic bath of two-level modes and the truncated
// excitation-configuration space they act on.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinbath/common.hpp"

namespace spinbath {

inline std::uint64_t binomial(unsigned n, unsigned k) {
  static constexpr auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> c{};
    for (unsigned i = 0; i <= 64; ++i) {
      c[i][0] = 1;
      for (unsigned j = 1; j <= i; ++j)
        c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
    return c;
  }();
  if (n > 64 || k > n) return 0;
  return table[n][k];
}

enum class BathSampling { endpoints, centers };

// Equally spaced sampling of an Ohmic spectral density J(w) = M g w up to
// the cutoff; lambda[j]^2/omega[j] sums to M g w_c independent of n_modes.
struct BathSpec {
  int n_modes = 0;
  double omega_cutoff = 0.0;
  double gamma = 0.0;  // friction rate, a.u. of inverse time
  double mass = 0.0;   // system mass the friction refers to
  double kappa = 0.0;  // nearest-neighbor intra-bath hop strength
  double delta_omega = 0.0;
  BathSampling sampling = BathSampling::endpoints;
  dvector omega;   // mode frequencies, ascending
  dvector lambda;  // system-mode couplings

  // Time at which the discrete bath feeds energy back coherently.
  double recurrence_time() const {
    return 2.0 * std::numbers::pi / delta_omega;
  }
};

inline BathSpec sample_ohmic_bath(int n_modes, double omega_cutoff,
                                  double gamma, double mass,
                                  double kappa = 0.0,
                                  BathSampling sampling =
                                      BathSampling::endpoints) {
  if (n_modes < 1 || n_modes > 63)
    throw std::invalid_argument("sample_ohmic_bath: n_modes must be in [1, 63]");
  if (!(omega_cutoff > 0.0) || !(mass > 0.0))
    throw std::invalid_argument(
        "sample_ohmic_bath: omega_cutoff and mass must be positive");
  if (gamma < 0.0)
    throw std::invalid_argument("sample_ohmic_bath: gamma must be nonnegative");
  BathSpec b;
  b.n_modes = n_modes;
  b.omega_cutoff = omega_cutoff;
  b.gamma = gamma;
  b.mass = mass;
  b.kappa = kappa;
  b.sampling = sampling;
  b.delta_omega = omega_cutoff / static_cast<double>(n_modes);
  b.omega.resize(n_modes);
  b.lambda.resize(n_modes);
  for (int j = 0; j < n_modes; ++j) {
    const double step = sampling == BathSampling::endpoints
                            ? static_cast<double>(j + 1)
                            : static_cast<double>(j) + 0.5;
    b.omega[j] = step * b.delta_omega;
    b.lambda[j] = std::sqrt(mass * gamma * b.omega[j] * b.delta_omega);
  }
  return b;
}

// All bitmasks over n_modes with popcount <= max_excitations, ranked
// popcount-major and value-minor.  Ranks are dense indices into state rows.
struct ConfigurationSpace {
  int n_modes = 0;
  int max_excitations = 0;
  std::vector<std::uint64_t> masks;
  std::vector<std::size_t> block_offset;  // by popcount, size max_exc + 2

  std::size_t dim() const { return masks.size(); }

  bool contains(std::uint64_t mask) const {
    if (n_modes < 64 && (mask >> n_modes) != 0) return false;
    return std::popcount(mask) <= max_excitations;
  }

  // Combinadic rank; inverse of masks[rank].
  std::size_t rank_of(std::uint64_t mask) const {
    if (!contains(mask))
      throw std::invalid_argument("ConfigurationSpace: mask outside space");
    const int pc = std::popcount(mask);
    std::size_t r = block_offset[pc];
    unsigned t = 1;
    while (mask != 0) {
      const unsigned p = static_cast<unsigned>(std::countr_zero(mask));
      r += binomial(p, t++);
      mask &= mask - 1;
    }
    return r;
  }
};

inline ConfigurationSpace build_configuration_space(int n_modes,
                                                    int max_excitations) {
  if (n_modes < 1 || n_modes > 63)
    throw std::invalid_argument(
        "build_configuration_space: n_modes must be in [1, 63]");
  if (max_excitations < 0 || max_excitations > n_modes)
    throw std::invalid_argument(
        "build_configuration_space: max_excitations must be in [0, n_modes]");
  ConfigurationSpace s;
  s.n_modes = n_modes;
  s.max_excitations = max_excitations;
  s.block_offset.assign(static_cast<std::size_t>(max_excitations) + 2, 0);
  std::size_t total = 0;
  for (int pc = 0; pc <= max_excitations; ++pc) {
    s.block_offset[pc] = total;
    total += binomial(static_cast<unsigned>(n_modes),
                      static_cast<unsigned>(pc));
  }
  s.block_offset[max_excitations + 1] = total;
  s.masks.reserve(total);
  for (int pc = 0; pc <= max_excitations; ++pc) {
    if (pc == 0) {
      s.masks.push_back(0);
      continue;
    }
    // Gosper's hack walks same-popcount masks in increasing value.
    std::uint64_t m = (std::uint64_t{1} << pc) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n_modes;
    while (m < limit) {
      s.masks.push_back(m);
      const std::uint64_t c = m & -m;
      const std::uint64_t r = m + c;
      m = (((r ^ m) >> 2) / c) | r;
    }
  }
  return s;
}

// Admissible single-mode flips out of masks[rank]: (mode, neighbor rank).
inline std::vector<std::pair<int, std::size_t>> neighbors_under_flip(
    const ConfigurationSpace& s, std::size_t rank) {
  if (rank >= s.dim())
    throw std::invalid_argument("neighbors_under_flip: rank out of range");
  const std::uint64_t mask = s.masks[rank];
  std::vector<std::pair<int, std::size_t>> out;
  out.reserve(static_cast<std::size_t>(s.n_modes));
  for (int j = 0; j < s.n_modes; ++j) {
    const std::uint64_t flipped = mask ^ (std::uint64_t{1} << j);
    if (std::popcount(flipped) <= s.max_excitations)
      out.emplace_back(j, s.rank_of(flipped));
  }
  return out;
}

}  // namespace spinbath
