// Matrix-free Hamiltonian: kinetic + potential on the grid diagonal of each
// configuration row, bath energies on the configuration diagonal, and
// gather-style flip/swap couplings between rows.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <stdexcept>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/fft.hpp"
#include "spinbath/grid.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

enum : unsigned {
  term_system = 1u,       // P^2/2M + V(R)
  term_bath = 2u,         // sum of occupied mode frequencies
  term_coupling = 4u,     // -f(R) sum_j lambda_j (raise_j + lower_j)
  term_interaction = 8u,  // kappa sum_j (raise_j lower_{j+1} + h.c.)
  term_all = 15u,
};

struct HamiltonianSpec {
  SpatialGrid grid;
  MorseParams morse;
  BathSpec bath;
  ConfigurationSpace space;
  dvector potential;       // V(R_i)
  dvector coupling_f;      // f(R_i)
  dvector kinetic_factor;  // k_i^2 / 2M, FFT order
  dvector kinetic_scale;   // kinetic_factor / n_points
  dvector bath_energy;     // per configuration
  // Gather tables: for destination row c, flip_source[k] lists source rows
  // one admissible spin flip away, with matrix weight -f(R) flip_lambda[k].
  std::vector<std::size_t> flip_offset;
  std::vector<std::uint32_t> flip_source;
  dvector flip_lambda;
  // Same layout for neighbor-swap sources, uniform weight kappa.
  std::vector<std::size_t> swap_offset;
  std::vector<std::uint32_t> swap_source;
  std::shared_ptr<const RowFft> fft;
};

// The plain Morse system; a custom potential overrides the well shape but
// keeps mass and coupling profile from `morse`.
inline HamiltonianSpec build_hamiltonian(const SpatialGrid& grid,
                                         const MorseParams& morse,
                                         const BathSpec& bath,
                                         const ConfigurationSpace& space,
                                         const dvector* potential_override =
                                             nullptr) {
  validate_morse(morse);
  if (bath.n_modes != space.n_modes)
    throw std::invalid_argument("build_hamiltonian: bath/space mode mismatch");
  if (potential_override != nullptr &&
      potential_override->size() != grid.n_points)
    throw std::invalid_argument("build_hamiltonian: potential size mismatch");
  HamiltonianSpec h;
  h.grid = grid;
  h.morse = morse;
  h.bath = bath;
  h.space = space;
  h.potential = potential_override != nullptr ? *potential_override
                                              : morse_potential(grid, morse);
  h.coupling_f = coupling_profile(grid, morse.alpha);
  h.kinetic_factor.resize(grid.n_points);
  h.kinetic_scale.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    h.kinetic_factor[i] = grid.k[i] * grid.k[i] / (2.0 * morse.mass);
    h.kinetic_scale[i] =
        h.kinetic_factor[i] / static_cast<double>(grid.n_points);
  }
  const std::size_t dim = space.dim();
  h.bath_energy.resize(dim);
  h.flip_offset.assign(dim + 1, 0);
  h.swap_offset.assign(dim + 1, 0);
  for (std::size_t c = 0; c < dim; ++c) {
    double e = 0.0;
    std::uint64_t m = space.masks[c];
    while (m != 0) {
      e += bath.omega[std::countr_zero(m)];
      m &= m - 1;
    }
    h.bath_energy[c] = e;

    for (const auto& [mode, src] : neighbors_under_flip(space, c)) {
      h.flip_source.push_back(static_cast<std::uint32_t>(src));
      h.flip_lambda.push_back(bath.lambda[mode]);
    }
    h.flip_offset[c + 1] = h.flip_source.size();

    const std::uint64_t mask = space.masks[c];
    for (int mde = 0; mde + 1 < space.n_modes; ++mde) {
      const std::uint64_t pair = std::uint64_t{3} << mde;
      const std::uint64_t occ = mask & pair;
      if (occ == 0 || occ == pair) continue;
      h.swap_source.push_back(
          static_cast<std::uint32_t>(space.rank_of(mask ^ pair)));
    }
    h.swap_offset[c + 1] = h.swap_source.size();
  }
  h.fft = std::make_shared<RowFft>(grid.n_points);
  return h;
}

struct ApplyWorkspace {
  cvector tbuf;  // kinetic term, all rows
  cvector acc;   // gathered flip sources, one row

  void ensure(const HamiltonianSpec& h) {
    tbuf.resize(h.space.dim() * h.grid.n_points);
    acc.resize(h.grid.n_points);
  }
};

inline void check_state_matches(const HamiltonianSpec& h,
                                const SpinorState& psi) {
  if (psi.grid.n_points != h.grid.n_points ||
      psi.space.n_modes != h.space.n_modes ||
      psi.space.max_excitations != h.space.max_excitations ||
      psi.amp.size() != h.space.dim() * h.grid.n_points)
    throw std::invalid_argument("hamiltonian: state shape mismatch");
}

namespace detail {

// acc += w * src, in real arithmetic so the loop vectorizes.
inline void axpy_real(double w, const cplx* src, cplx* acc, std::size_t n) {
  const double* s = reinterpret_cast<const double*>(src);
  double* a = reinterpret_cast<double*>(acc);
  for (std::size_t d = 0; d < 2 * n; ++d) a[d] += w * s[d];
}

}  // namespace detail

// out = alpha * H_terms(in) + beta * in + gamma * extra, where H_terms keeps
// only the requested pieces.  `in` and `out` must not alias.
inline void apply_terms(const HamiltonianSpec& h, const cplx* in, cplx* out,
                        ApplyWorkspace& ws, unsigned terms, double alpha = 1.0,
                        double beta = 0.0, const cplx* extra = nullptr,
                        double gamma = 0.0) {
  const std::size_t n = h.grid.n_points;
  const std::size_t dim = h.space.dim();
  ws.ensure(h);

  const bool with_system = (terms & term_system) != 0;
  const bool with_bath = (terms & term_bath) != 0;
  const bool with_coupling = (terms & term_coupling) != 0;
  const bool with_swap = (terms & term_interaction) != 0 && h.bath.kappa != 0.0;

  if (with_system)
    apply_spectral_scale_rows(*h.fft, h.kinetic_scale.data(), dim, in,
                              ws.tbuf.data());

  cplx* acc = ws.acc.data();
  for (std::size_t c = 0; c < dim; ++c) {
    const cplx* src = in + c * n;
    const cplx* tin = ws.tbuf.data() + c * n;
    cplx* dst = out + c * n;

    bool have_acc = false;
    if (with_coupling) {
      const std::size_t b = h.flip_offset[c], e = h.flip_offset[c + 1];
      if (b != e) {
        std::fill(ws.acc.begin(), ws.acc.end(), cplx{0.0, 0.0});
        for (std::size_t k = b; k < e; ++k)
          detail::axpy_real(h.flip_lambda[k],
                            in + std::size_t{h.flip_source[k]} * n, acc, n);
        have_acc = true;
      }
    }
    std::size_t swap_b = 0, swap_e = 0;
    double swap_scale = 0.0;
    if (with_swap) {
      swap_b = h.swap_offset[c];
      swap_e = h.swap_offset[c + 1];
      if (swap_b != swap_e) swap_scale = h.bath.kappa;
    }

    const double diag = with_bath ? h.bath_energy[c] : 0.0;
    const double* pot = with_system ? h.potential.data() : nullptr;
    const double* fprof = have_acc ? h.coupling_f.data() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      cplx hval = diag * src[i];
      if (with_system) hval += tin[i] + pot[i] * src[i];
      if (fprof != nullptr) hval -= fprof[i] * acc[i];
      if (swap_scale != 0.0) {
        cplx sw{0.0, 0.0};
        for (std::size_t k = swap_b; k < swap_e; ++k)
          sw += in[std::size_t{h.swap_source[k]} * n + i];
        hval += swap_scale * sw;
      }
      cplx o = alpha * hval + beta * src[i];
      if (extra != nullptr) o += gamma * extra[c * n + i];
      dst[i] = o;
    }
  }
}

inline SpinorState apply_hamiltonian(const HamiltonianSpec& h,
                                     const SpinorState& psi) {
  check_state_matches(h, psi);
  SpinorState out = psi;
  ApplyWorkspace ws;
  apply_terms(h, psi.amp.data(), out.amp.data(), ws,
              term_system | term_bath | term_coupling);
  return out;
}

inline SpinorState apply_bath_interaction(const HamiltonianSpec& h,
                                          const SpinorState& psi) {
  check_state_matches(h, psi);
  SpinorState out = psi;
  ApplyWorkspace ws;
  apply_terms(h, psi.amp.data(), out.amp.data(), ws, term_interaction);
  return out;
}

struct EnergyParts {
  double system = 0.0;
  double bath = 0.0;
  double coupling = 0.0;
  double interaction = 0.0;

  double total() const { return system + bath + coupling + interaction; }
  // System energy with the surface-dressing half of the coupling.
  double effective_system() const { return system + 0.5 * coupling; }
};

inline EnergyParts expectation_parts(const HamiltonianSpec& h,
                                     const SpinorState& psi) {
  check_state_matches(h, psi);
  const double nrm = state_norm(psi);
  if (std::abs(nrm - 1.0) > 1e-6)
    throw std::invalid_argument("expectation_parts: state is not normalized");
  ApplyWorkspace ws;
  cvector hpsi(psi.amp.size());
  EnergyParts parts;
  const auto expect = [&](unsigned terms) {
    apply_terms(h, psi.amp.data(), hpsi.data(), ws, terms);
    double s = 0.0;
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
      const cplx z = std::conj(psi.amp[i]) * hpsi[i];
      s += z.real();
    }
    return s * psi.grid.dr;
  };
  parts.system = expect(term_system);
  parts.bath = expect(term_bath);
  parts.coupling = expect(term_coupling);
  parts.interaction = h.bath.kappa != 0.0 ? expect(term_interaction) : 0.0;
  return parts;
}

struct BathSpectrumShift {
  dvector eigenfrequencies;   // ascending
  double max_relative_shift;  // max_j |eig_j - omega_j| / omega_j
};

// Diagonalizes the one-excitation bath block (tridiagonal in mode index).
inline BathSpectrumShift bath_spectrum_shift(const BathSpec& bath) {
  const int n = bath.n_modes;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    t(j, j) = bath.omega[j];
    if (j + 1 < n) {
      t(j, j + 1) = bath.kappa;
      t(j + 1, j) = bath.kappa;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  BathSpectrumShift out;
  out.eigenfrequencies.assign(es.eigenvalues().data(),
                              es.eigenvalues().data() + n);
  out.max_relative_shift = 0.0;
  for (int j = 0; j < n; ++j) {
    const double rel =
        std::abs(out.eigenfrequencies[j] - bath.omega[j]) / bath.omega[j];
    out.max_relative_shift = std::max(out.max_relative_shift, rel);
  }
  return out;
}

}  // namespace spinbath
