// Combined system-bath wave function: one grid row per bath configuration.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/grid.hpp"

namespace spinbath {

// amp is config-major: row c spans [c*n_points, (c+1)*n_points).
struct SpinorState {
  SpatialGrid grid;
  ConfigurationSpace space;
  cvector amp;

  cplx* row(std::size_t c) { return amp.data() + c * grid.n_points; }
  const cplx* row(std::size_t c) const {
    return amp.data() + c * grid.n_points;
  }
};

inline SpinorState make_zero_state(const SpatialGrid& grid,
                                   const ConfigurationSpace& space) {
  SpinorState psi;
  psi.grid = grid;
  psi.space = space;
  psi.amp.assign(space.dim() * grid.n_points, cplx{0.0, 0.0});
  return psi;
}

// System wave function times the bath vacuum.
inline SpinorState make_product_state(const SpatialGrid& grid,
                                      const ConfigurationSpace& space,
                                      const cvector& system_wave) {
  if (system_wave.size() != grid.n_points)
    throw std::invalid_argument("make_product_state: wave size mismatch");
  SpinorState psi = make_zero_state(grid, space);
  for (std::size_t i = 0; i < grid.n_points; ++i) psi.amp[i] = system_wave[i];
  return psi;
}

inline bool same_shape(const SpinorState& a, const SpinorState& b) {
  return a.grid.n_points == b.grid.n_points && a.grid.dr == b.grid.dr &&
         a.space.n_modes == b.space.n_modes &&
         a.space.max_excitations == b.space.max_excitations &&
         a.amp.size() == b.amp.size();
}

inline double state_norm_squared(const SpinorState& psi) {
  double s = 0.0;
  for (const cplx& z : psi.amp) s += std::norm(z);
  return s * psi.grid.dr;
}

inline double state_norm(const SpinorState& psi) {
  return std::sqrt(state_norm_squared(psi));
}

inline cplx state_inner(const SpinorState& a, const SpinorState& b) {
  if (!same_shape(a, b))
    throw std::invalid_argument("state_inner: shape mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i)
    s += std::conj(a.amp[i]) * b.amp[i];
  return s * a.grid.dr;
}

inline void normalize_state(SpinorState& psi) {
  const double nrm = state_norm(psi);
  if (!(nrm > 1e-300))
    throw std::invalid_argument("normalize_state: vanishing norm");
  const double inv = 1.0 / nrm;
  for (cplx& z : psi.amp) z *= inv;
}

inline double mean_position(const SpinorState& psi) {
  double s = 0.0;
  const std::size_t n = psi.grid.n_points;
  for (std::size_t c = 0; c < psi.space.dim(); ++c) {
    const cplx* rowc = psi.row(c);
    for (std::size_t i = 0; i < n; ++i) s += psi.grid.r[i] * std::norm(rowc[i]);
  }
  return s * psi.grid.dr;
}

// Probability resting on the first and last grid point; the propagation
// loop treats growth here as wrap-around contamination.
inline double edge_probability(const SpinorState& psi) {
  const std::size_t n = psi.grid.n_points;
  double s = 0.0;
  for (std::size_t c = 0; c < psi.space.dim(); ++c) {
    const cplx* rowc = psi.row(c);
    s += std::norm(rowc[0]) + std::norm(rowc[n - 1]);
  }
  return s * psi.grid.dr;
}

}  // namespace spinbath
