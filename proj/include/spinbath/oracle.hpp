// Dense untruncated reference: explicit Hamiltonian matrix, exact
// propagation and ground states for small instances.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/grid.hpp"
#include "spinbath/state.hpp"

namespace spinbath {
namespace oracle {

inline constexpr std::size_t max_dense_dim = 262144;

struct DenseInstance {
  SpatialGrid grid;
  MorseParams morse;
  BathSpec bath;
  ConfigurationSpace space;  // untruncated: max_excitations = n_modes
  Eigen::MatrixXcd h;        // (2^N n_points) square
};

// Basis index: configuration rank times n_points plus grid index, matching
// the row layout of SpinorState with an untruncated space.
inline DenseInstance build_dense(const SpatialGrid& grid,
                                 const MorseParams& morse,
                                 const BathSpec& bath,
                                 const dvector* potential_override = nullptr) {
  validate_morse(morse);
  const std::size_t dim_cfg = std::size_t{1}
                              << static_cast<unsigned>(bath.n_modes);
  const std::size_t dim = dim_cfg * grid.n_points;
  if (bath.n_modes > 20 || dim > max_dense_dim)
    throw std::invalid_argument("build_dense: instance too large");
  DenseInstance inst;
  inst.grid = grid;
  inst.morse = morse;
  inst.bath = bath;
  inst.space = build_configuration_space(bath.n_modes, bath.n_modes);
  const dvector pot = potential_override != nullptr
                          ? *potential_override
                          : morse_potential(grid, morse);
  if (pot.size() != grid.n_points)
    throw std::invalid_argument("build_dense: potential size mismatch");
  const dvector f = coupling_profile(grid, morse.alpha);

  // Kinetic block from the DFT definition, independent of the FFT library:
  // T = F^dag diag(k^2/2M) F / n.
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  Eigen::MatrixXcd fourier(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index x = 0; x < n; ++x)
      fourier(k, x) = std::polar(
          1.0, -2.0 * std::numbers::pi * static_cast<double>(k) *
                   static_cast<double>(x) / static_cast<double>(n));
  Eigen::VectorXd kin(n);
  for (Eigen::Index k = 0; k < n; ++k)
    kin(k) = grid.k[static_cast<std::size_t>(k)] *
             grid.k[static_cast<std::size_t>(k)] / (2.0 * morse.mass);
  const Eigen::MatrixXcd t_block = fourier.adjoint() * kin.asDiagonal() *
                                   fourier / static_cast<double>(n);

  inst.h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim_cfg; ++c) {
    const std::uint64_t mask = inst.space.masks[c];
    const auto base = static_cast<Eigen::Index>(c * grid.n_points);
    double e_bath = 0.0;
    std::uint64_t m = mask;
    while (m != 0) {
      e_bath += bath.omega[std::countr_zero(m)];
      m &= m - 1;
    }
    inst.h.block(base, base, n, n) = t_block;
    for (Eigen::Index i = 0; i < n; ++i)
      inst.h(base + i, base + i) += pot[static_cast<std::size_t>(i)] + e_bath;

    for (int j = 0; j < bath.n_modes; ++j) {
      const std::uint64_t flipped = mask ^ (std::uint64_t{1} << j);
      const auto src = static_cast<Eigen::Index>(
          inst.space.rank_of(flipped) * grid.n_points);
      for (Eigen::Index i = 0; i < n; ++i)
        inst.h(base + i, src + i) -=
            bath.lambda[j] * f[static_cast<std::size_t>(i)];
    }
    if (bath.kappa != 0.0) {
      for (int j = 0; j + 1 < bath.n_modes; ++j) {
        const std::uint64_t pair = std::uint64_t{3} << j;
        const std::uint64_t occ = mask & pair;
        if (occ == 0 || occ == pair) continue;
        const auto src = static_cast<Eigen::Index>(
            inst.space.rank_of(mask ^ pair) * grid.n_points);
        for (Eigen::Index i = 0; i < n; ++i)
          inst.h(base + i, src + i) += bath.kappa;
      }
    }
  }
  return inst;
}

inline Eigen::VectorXcd state_to_vector(const SpinorState& psi) {
  return Eigen::Map<const Eigen::VectorXcd>(
      psi.amp.data(), static_cast<Eigen::Index>(psi.amp.size()));
}

inline SpinorState vector_to_state(const SpatialGrid& grid,
                                   const ConfigurationSpace& space,
                                   const Eigen::VectorXcd& v) {
  SpinorState psi = make_zero_state(grid, space);
  if (static_cast<std::size_t>(v.size()) != psi.amp.size())
    throw std::invalid_argument("vector_to_state: size mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i)
    psi.amp[static_cast<std::size_t>(i)] = v(i);
  return psi;
}

inline Eigen::VectorXcd exact_propagate(const DenseInstance& inst,
                                        const Eigen::VectorXcd& psi0,
                                        double t_au) {
  if (psi0.size() != inst.h.rows())
    throw std::invalid_argument("exact_propagate: size mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inst.h);
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * psi0;
  Eigen::VectorXcd rotated(coeffs.size());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    rotated(k) = coeffs(k) * std::polar(1.0, -es.eigenvalues()(k) * t_au);
  return es.eigenvectors() * rotated;
}

struct GroundState {
  Eigen::VectorXcd state;
  double energy = 0.0;
};

inline GroundState exact_ground_state(const DenseInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inst.h);
  GroundState g;
  g.energy = es.eigenvalues()(0);
  g.state = es.eigenvectors().col(0);
  // Normalize with the dr weight to match SpinorState conventions.
  g.state /= std::sqrt(inst.grid.dr);
  return g;
}

}  // namespace oracle
}  // namespace spinbath
