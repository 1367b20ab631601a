// System-side observables: reduced density matrix, bath occupations,
// trajectory records, and superposition-coherence bookkeeping.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/grid.hpp"
#include "spinbath/hamiltonian.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

// Coordinate-representation density matrix; entries carry the dr weight so
// trace and products are plain matrix operations.
struct ReducedDensityMatrix {
  Eigen::MatrixXcd rho;
  SpatialGrid grid;
};

inline ReducedDensityMatrix reduce_system_density(const SpinorState& psi) {
  const auto n = static_cast<Eigen::Index>(psi.grid.n_points);
  const auto dim = static_cast<Eigen::Index>(psi.space.dim());
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      a(psi.amp.data(), dim, n);
  ReducedDensityMatrix out;
  out.grid = psi.grid;
  // rho[i][j] = sum_c psi_c(i) conj(psi_c(j)) dr
  out.rho = (a.transpose() * a.conjugate()) * psi.grid.dr;
  return out;
}

inline double density_trace(const ReducedDensityMatrix& d) {
  return d.rho.trace().real();
}

inline double purity(const ReducedDensityMatrix& d) {
  return (d.rho * d.rho).trace().real();
}

// Occupation probability of each bath mode.
inline dvector bath_populations(const SpinorState& psi) {
  dvector pops(static_cast<std::size_t>(psi.space.n_modes), 0.0);
  const std::size_t n = psi.grid.n_points;
  for (std::size_t c = 0; c < psi.space.dim(); ++c) {
    std::uint64_t mask = psi.space.masks[c];
    if (mask == 0) continue;
    const cplx* rowc = psi.row(c);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += std::norm(rowc[i]);
    w *= psi.grid.dr;
    while (mask != 0) {
      pops[static_cast<std::size_t>(std::countr_zero(mask))] += w;
      mask &= mask - 1;
    }
  }
  return pops;
}

struct TrajectoryRecord {
  double time_fs = 0.0;
  double mean_r = 0.0;
  double e_bare = 0.0;  // system term alone
  double e_eff = 0.0;   // system plus half the coupling
  double norm = 1.0;
  dvector populations;
  std::optional<double> n_coh;
  std::optional<double> c2;
  std::optional<double> tr_rho_coh2;
};

inline TrajectoryRecord sample_trajectory(const HamiltonianSpec& h,
                                          const SpinorState& psi,
                                          double time_fs) {
  TrajectoryRecord rec;
  rec.time_fs = time_fs;
  rec.norm = state_norm(psi);
  rec.mean_r = mean_position(psi);
  const EnergyParts parts = expectation_parts(h, psi);
  rec.e_bare = parts.system;
  rec.e_eff = parts.effective_system();
  rec.populations = bath_populations(psi);
  return rec;
}

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trajectory_csv_header(int n_modes, bool with_coherence) {
  std::string line = "time_fs,mean_R_au,E_bare_au,E_eff_au,norm";
  for (int j = 1; j <= n_modes; ++j) line += ",pop_" + std::to_string(j);
  if (with_coherence) line += ",n_coh,C2,tr_rho_coh2";
  return line;
}

inline std::string trajectory_csv_row(const TrajectoryRecord& rec) {
  std::string line = format_g17(rec.time_fs);
  line += "," + format_g17(rec.mean_r);
  line += "," + format_g17(rec.e_bare);
  line += "," + format_g17(rec.e_eff);
  line += "," + format_g17(rec.norm);
  for (const double p : rec.populations) line += "," + format_g17(p);
  if (rec.n_coh) {
    line += "," + format_g17(*rec.n_coh);
    line += "," + format_g17(rec.c2.value_or(0.0));
    line += "," + format_g17(rec.tr_rho_coh2.value_or(0.0));
  }
  return line;
}

// Two-branch superposition register in a harmonic well.  Branch centers
// follow the classical trajectory so the analysis basis tracks the packets.
struct CatStateBasis {
  double mass = 0.0;
  double omega0 = 0.0;
  double delta = 0.0;  // branch separation at t = 0
  double p0 = 0.0;     // branch momentum magnitude at t = 0
  cvector plus;        // normalized branch packets on the grid
  cvector minus;
  cplx overlap{0.0, 0.0};

  double width() const { return std::sqrt(1.0 / (2.0 * mass * omega0)); }
};

inline CatStateBasis make_cat_basis(const SpatialGrid& grid, double mass,
                                    double omega0, double delta, double p0,
                                    double t_au = 0.0) {
  if (!(mass > 0.0) || !(omega0 > 0.0))
    throw std::invalid_argument("make_cat_basis: mass and omega0 must be positive");
  CatStateBasis basis;
  basis.mass = mass;
  basis.omega0 = omega0;
  basis.delta = delta;
  basis.p0 = p0;
  const double r0 = 0.5 * delta;
  const double c = std::cos(omega0 * t_au), s = std::sin(omega0 * t_au);
  const double r_plus = r0 * c + p0 / (mass * omega0) * s;
  const double p_plus = p0 * c - mass * omega0 * r0 * s;
  const double r_minus = -r0 * c + p0 / (mass * omega0) * s;
  const double p_minus = p0 * c + mass * omega0 * r0 * s;
  // Ground-state wave function width of the well, sqrt(1/(M w)).
  const double packet_width = 1.0 / std::sqrt(mass * omega0);
  basis.plus = gaussian_packet(grid, r_plus, packet_width, p_plus);
  basis.minus = gaussian_packet(grid, r_minus, packet_width, p_minus);
  basis.overlap = grid_inner(grid, basis.plus, basis.minus);
  return basis;
}

inline SpinorState build_cat_state(const SpatialGrid& grid,
                                   const ConfigurationSpace& space,
                                   const CatStateBasis& basis) {
  cvector wave(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i)
    wave[i] = basis.plus[i] + basis.minus[i];
  const double nrm = grid_norm(grid, wave);
  if (!(nrm > 1e-12))
    throw std::invalid_argument("build_cat_state: branches cancel");
  for (cplx& z : wave) z /= nrm;
  return make_product_state(grid, space, wave);
}

// Cross-branch coherence surviving in rho, measured in the symmetrically
// orthogonalized branch basis: n_coh = 2 |<e_plus| rho |e_minus>|^2.
inline double coherence_norm(const ReducedDensityMatrix& d,
                             const CatStateBasis& basis) {
  if (std::abs(basis.overlap) > 0.5)
    throw std::invalid_argument(
        "coherence_norm: branch packets overlap too strongly to separate");
  const auto n = static_cast<Eigen::Index>(d.grid.n_points);
  Eigen::MatrixXcd e(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    e(i, 0) = basis.plus[static_cast<std::size_t>(i)];
    e(i, 1) = basis.minus[static_cast<std::size_t>(i)];
  }
  Eigen::Matrix2cd s;
  s << cplx{1.0, 0.0}, basis.overlap, std::conj(basis.overlap),
      cplx{1.0, 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(s);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (!(ev(0) > 1e-12))
    throw std::invalid_argument("coherence_norm: branch overlap is singular");
  const Eigen::Matrix2cd s_inv_half =
      es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal() *
      es.eigenvectors().adjoint();
  const Eigen::MatrixXcd ortho = e * s_inv_half;
  // <e_a| rho |e_b>: one dr lives in the rho entries, one in the remaining
  // coordinate integral.
  const Eigen::Matrix2cd m = ortho.adjoint() * d.rho * ortho * d.grid.dr;
  return 2.0 * std::norm(m(0, 1));
}

struct PointerWeights {
  double c2 = 0.0;          // weight of the equilibrium component
  double tr_rho_coh2 = 0.0; // squared size of the remainder
};

// Splits rho into C^2 rho_eq plus an orthogonal remainder (trace inner
// product), and reports the remainder's squared norm.
inline PointerWeights pointer_decomposition(const ReducedDensityMatrix& d,
                                            const ReducedDensityMatrix& eq) {
  if (d.rho.rows() != eq.rho.rows())
    throw std::invalid_argument("pointer_decomposition: size mismatch");
  const double eq2 = (eq.rho * eq.rho).trace().real();
  if (!(eq2 > 1e-12))
    throw std::invalid_argument("pointer_decomposition: equilibrium state vanishes");
  PointerWeights w;
  w.c2 = (d.rho * eq.rho).trace().real() / eq2;
  const Eigen::MatrixXcd coh = d.rho - w.c2 * eq.rho;
  w.tr_rho_coh2 = (coh * coh.adjoint()).trace().real();
  return w;
}

}  // namespace spinbath
