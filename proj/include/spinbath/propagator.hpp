// Chebychev polynomial propagation in real and imaginary time.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/hamiltonian.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

struct SpectralBounds {
  double e_min = 0.0;
  double e_max = 0.0;
};

// Cheap rigorous enclosure of the spectrum: diagonal extremes widened by
// row-sum bounds on the off-diagonal couplings.
inline SpectralBounds estimate_spectral_bounds(const HamiltonianSpec& h) {
  double vmin = h.potential[0], vmax = h.potential[0];
  for (const double v : h.potential) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  double tmax = 0.0;
  for (const double t : h.kinetic_factor) tmax = std::max(tmax, t);
  double fmax = 0.0;
  for (const double f : h.coupling_f) fmax = std::max(fmax, std::abs(f));
  double lambda_sum = 0.0;
  for (const double l : h.bath.lambda) lambda_sum += l;
  const int m = std::min(h.space.max_excitations, h.space.n_modes);
  double bath_max = 0.0;
  for (int j = 0; j < m; ++j)
    bath_max += h.bath.omega[h.bath.omega.size() - 1 - j];
  const double coupling_max = fmax * lambda_sum;
  const double swap_max = 2.0 * std::abs(h.bath.kappa) * m;
  SpectralBounds b;
  b.e_min = vmin - coupling_max - swap_max;
  b.e_max = vmax + tmax + bath_max + coupling_max + swap_max;
  return b;
}

// Expansion of the step operator in Chebychev polynomials of the
// Hamiltonian mapped to [-1, 1].  Imaginary-time plans drop the uniform
// e^{-e_mid tau} factor since relaxation renormalizes every step.
struct ChebychevPlan {
  double dt_au = 0.0;
  bool imaginary_time = false;
  SpectralBounds bounds;
  double e_mid = 0.0;
  double de_half = 0.0;  // includes safety margin
  cplx phase{1.0, 0.0};
  std::vector<cplx> coeff;
  double tolerance = 1e-12;
};

inline ChebychevPlan build_chebychev_plan(const HamiltonianSpec& h,
                                          double dt_au,
                                          double tolerance = 1e-12) {
  if (!(dt_au > 0.0))
    throw std::invalid_argument("build_chebychev_plan: dt must be positive");
  if (!(tolerance > 0.0) || tolerance >= 1.0)
    throw std::invalid_argument(
        "build_chebychev_plan: tolerance must lie in (0, 1)");
  ChebychevPlan plan;
  plan.dt_au = dt_au;
  plan.tolerance = tolerance;
  plan.bounds = estimate_spectral_bounds(h);
  plan.e_mid = 0.5 * (plan.bounds.e_max + plan.bounds.e_min);
  plan.de_half = 0.5 * (plan.bounds.e_max - plan.bounds.e_min) * 1.05;
  if (!(plan.de_half > 0.0))
    throw std::invalid_argument("build_chebychev_plan: empty spectral range");
  plan.phase = std::polar(1.0, -plan.e_mid * dt_au);
  const double theta = plan.de_half * dt_au;
  const std::size_t k_cap = static_cast<std::size_t>(theta) + 200;
  const cplx minus_i{0.0, -1.0};
  cplx ik{1.0, 0.0};
  std::size_t small_run = 0;
  for (std::size_t k = 0; k <= k_cap; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), theta);
    plan.coeff.push_back((k == 0 ? 1.0 : 2.0) * ik * jk);
    ik *= minus_i;
    if (static_cast<double>(k) >= theta && std::abs(jk) < tolerance) {
      if (++small_run == 2) break;
    } else {
      small_run = 0;
    }
  }
  if (small_run < 2)
    throw numerical_error("build_chebychev_plan: expansion did not converge");
  while (!plan.coeff.empty() && std::abs(plan.coeff.back()) < tolerance)
    plan.coeff.pop_back();
  return plan;
}

inline ChebychevPlan build_imaginary_plan(const HamiltonianSpec& h,
                                          double tau_au,
                                          double tolerance = 1e-14) {
  if (!(tau_au > 0.0))
    throw std::invalid_argument("build_imaginary_plan: tau must be positive");
  ChebychevPlan plan;
  plan.dt_au = tau_au;
  plan.imaginary_time = true;
  plan.tolerance = tolerance;
  plan.bounds = estimate_spectral_bounds(h);
  plan.e_mid = 0.5 * (plan.bounds.e_max + plan.bounds.e_min);
  plan.de_half = 0.5 * (plan.bounds.e_max - plan.bounds.e_min) * 1.05;
  if (!(plan.de_half > 0.0))
    throw std::invalid_argument("build_imaginary_plan: empty spectral range");
  const double x = plan.de_half * tau_au;
  if (x > 600.0)
    throw config_error(
        "build_imaginary_plan: tau too large for the spectral width");
  const double i0 = std::cyl_bessel_i(0.0, x);
  double sign = 1.0;
  const std::size_t k_cap = static_cast<std::size_t>(x) + 400;
  for (std::size_t k = 0; k <= k_cap; ++k) {
    const double ik = std::cyl_bessel_i(static_cast<double>(k), x);
    plan.coeff.push_back(cplx{(k == 0 ? 1.0 : 2.0) * sign * ik, 0.0});
    sign = -sign;
    if (ik / i0 < tolerance && k >= 1) break;
  }
  return plan;
}

struct ChebWorkspace {
  cvector phi0, phi1, phi2, acc;
  ApplyWorkspace hws;

  void ensure(std::size_t size) {
    phi0.resize(size);
    phi1.resize(size);
    phi2.resize(size);
    acc.resize(size);
  }
};

namespace detail {

// y += w x in real arithmetic; returns sum |x|^2 for divergence tracking.
inline double caxpy_sumsq(cplx w, const cplx* x, cplx* y, std::size_t n) {
  const double wr = w.real(), wi = w.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += wr * xr - wi * xi;
    ys[2 * i + 1] += wr * xi + wi * xr;
    s += xr * xr + xi * xi;
  }
  return s;
}

inline void scale_complex(cplx w, cplx* y, std::size_t n) {
  const double wr = w.real(), wi = w.imag();
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    ys[2 * i] = wr * yr - wi * yi;
    ys[2 * i + 1] = wr * yi + wi * yr;
  }
}

}  // namespace detail

// One Chebychev step applied in place to amp (length `size`).
inline void chebychev_step(const ChebychevPlan& plan, const HamiltonianSpec& h,
                           cplx* amp, std::size_t size, ChebWorkspace& ws) {
  ws.ensure(size);
  const double inv_de = 1.0 / plan.de_half;
  const double shift = -plan.e_mid * inv_de;
  double in_sumsq = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    ws.phi0[i] = amp[i];
    in_sumsq += std::norm(amp[i]);
  }
  const double blow_up = 100.0 * std::max(in_sumsq, 1e-300);
  // phi1 = H_n phi0
  apply_terms(h, ws.phi0.data(), ws.phi1.data(), ws.hws, term_all, inv_de,
              shift);
  std::fill(ws.acc.begin(), ws.acc.end(), cplx{0.0, 0.0});
  detail::caxpy_sumsq(plan.coeff[0], ws.phi0.data(), ws.acc.data(), size);
  if (plan.coeff.size() > 1)
    detail::caxpy_sumsq(plan.coeff[1], ws.phi1.data(), ws.acc.data(), size);
  for (std::size_t k = 2; k < plan.coeff.size(); ++k) {
    // phi2 = 2 H_n phi1 - phi0
    apply_terms(h, ws.phi1.data(), ws.phi2.data(), ws.hws, term_all,
                2.0 * inv_de, 2.0 * shift, ws.phi0.data(), -1.0);
    const double sumsq =
        detail::caxpy_sumsq(plan.coeff[k], ws.phi2.data(), ws.acc.data(), size);
    if (sumsq > blow_up)
      throw numerical_error(
          "chebychev_step: recurrence diverged; spectral bounds violated");
    ws.phi0.swap(ws.phi1);
    ws.phi1.swap(ws.phi2);
  }
  if (plan.phase != cplx{1.0, 0.0})
    detail::scale_complex(plan.phase, ws.acc.data(), size);
  for (std::size_t i = 0; i < size; ++i) amp[i] = ws.acc[i];
}

inline void propagate_in_place(const ChebychevPlan& plan,
                               const HamiltonianSpec& h, SpinorState& psi,
                               std::size_t n_steps, ChebWorkspace& ws) {
  if (plan.imaginary_time)
    throw std::invalid_argument("propagate: real-time plan required");
  check_state_matches(h, psi);
  for (std::size_t s = 0; s < n_steps; ++s)
    chebychev_step(plan, h, psi.amp.data(), psi.amp.size(), ws);
}

inline SpinorState propagate(const ChebychevPlan& plan,
                             const HamiltonianSpec& h, const SpinorState& psi,
                             std::size_t n_steps) {
  SpinorState out = psi;
  ChebWorkspace ws;
  propagate_in_place(plan, h, out, n_steps, ws);
  return out;
}

// Full Hamiltonian expectation and variance of a normalized state.
struct EnergyMoments {
  double energy = 0.0;
  double variance = 0.0;
};

inline EnergyMoments energy_moments(const HamiltonianSpec& h,
                                    const SpinorState& psi, cvector& hpsi,
                                    ApplyWorkspace& ws) {
  hpsi.resize(psi.amp.size());
  apply_terms(h, psi.amp.data(), hpsi.data(), ws, term_all);
  double e = 0.0, h2 = 0.0;
  for (std::size_t i = 0; i < psi.amp.size(); ++i) {
    e += (std::conj(psi.amp[i]) * hpsi[i]).real();
    h2 += std::norm(hpsi[i]);
  }
  e *= psi.grid.dr;
  h2 *= psi.grid.dr;
  return {e, h2 - e * e};
}

// Imaginary-time relaxation toward the interacting ground state.  Stops when
// the energy step falls below `tolerance` and the energy variance confirms
// an eigenstate to within two orders of that tolerance.
inline SpinorState relax_imaginary_time(const HamiltonianSpec& h,
                                        const SpinorState& guess,
                                        double tau_au = 1.0,
                                        double tolerance = 1e-10,
                                        std::size_t max_iter = 200000) {
  check_state_matches(h, guess);
  if (!(tolerance > 0.0))
    throw std::invalid_argument("relax_imaginary_time: tolerance must be positive");
  const ChebychevPlan plan = build_imaginary_plan(h, tau_au);
  SpinorState psi = guess;
  normalize_state(psi);
  ChebWorkspace ws;
  cvector hpsi;
  double e_prev = energy_moments(h, psi, hpsi, ws.hws).energy;
  for (std::size_t it = 0; it < max_iter; ++it) {
    chebychev_step(plan, h, psi.amp.data(), psi.amp.size(), ws);
    normalize_state(psi);
    const EnergyMoments m = energy_moments(h, psi, hpsi, ws.hws);
    if (std::abs(m.energy - e_prev) < tolerance &&
        m.variance < 100.0 * tolerance)
      return psi;
    e_prev = m.energy;
  }
  throw numerical_error("relax_imaginary_time: no convergence within max_iter");
}

// Rigid shift of the system coordinate by r0 on every configuration row.
inline SpinorState displace(const SpinorState& psi, double r0) {
  SpinorState out = psi;
  if (r0 == 0.0) return out;
  const std::size_t n = psi.grid.n_points;
  RowFft fft(n);
  std::vector<cplx> phase(n);
  for (std::size_t i = 0; i < n; ++i)
    phase[i] = std::polar(1.0 / static_cast<double>(n), -psi.grid.k[i] * r0);
  cvector freq(n);
  for (std::size_t c = 0; c < psi.space.dim(); ++c) {
    cplx* rowc = out.row(c);
    fft.forward(rowc, freq.data());
    for (std::size_t i = 0; i < n; ++i) freq[i] *= phase[i];
    fft.inverse_inplace(freq.data());
    for (std::size_t i = 0; i < n; ++i) rowc[i] = freq[i];
  }
  const double spill = edge_probability(out);
  if (spill > 1e-8)
    std::cerr << "displace: warning: " << spill
              << " edge probability after shifting by " << r0 << "\n";
  return out;
}

}  // namespace spinbath
