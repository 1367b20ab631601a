// Coordinate grid, Morse system parameters, Gaussian packets, kinetic energy.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinbath/common.hpp"
#include "spinbath/fft.hpp"

namespace spinbath {

// Periodic coordinate grid; r[i] = r_min + i*dr, r_max is the wrap-around
// image of r_min and carries no point.  k is in FFT output order.
struct SpatialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t n_points = 0;
  double dr = 0.0;
  dvector r;
  dvector k;
};

inline SpatialGrid build_grid(double r_min, double r_max,
                              std::size_t n_points) {
  if (!(r_max > r_min))
    throw std::invalid_argument("build_grid: r_max must exceed r_min");
  const bool pow2 = n_points >= 2 && (n_points & (n_points - 1)) == 0;
  if (!pow2)
    throw std::invalid_argument(
        "build_grid: n_points must be a power of two >= 2");
  SpatialGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.n_points = n_points;
  g.dr = (r_max - r_min) / static_cast<double>(n_points);
  g.r.resize(n_points);
  g.k.resize(n_points);
  const double dk = 2.0 * std::numbers::pi / (r_max - r_min);
  for (std::size_t i = 0; i < n_points; ++i) {
    g.r[i] = r_min + static_cast<double>(i) * g.dr;
    const auto j = static_cast<std::ptrdiff_t>(i);
    const auto half = static_cast<std::ptrdiff_t>(n_points / 2);
    g.k[i] = dk * static_cast<double>(j < half
                                          ? j
                                          : j - static_cast<std::ptrdiff_t>(
                                                    n_points));
  }
  return g;
}

// Morse well D(e^{-2 a R} - 2 e^{-a R}); R is displacement from equilibrium.
struct MorseParams {
  double well_depth = 0.018;
  double alpha = 2.0;
  double mass = 1.0e5;

  // Harmonic frequency at the well bottom.
  double omega() const { return alpha * std::sqrt(2.0 * well_depth / mass); }
  // Ground-state width of the harmonic approximation.
  double r_tilde() const { return 1.0 / std::sqrt(mass * omega()); }
  double tau_osc() const { return 2.0 * std::numbers::pi / omega(); }
  // Anharmonic ground-state energy, -D + w/2 - w^2/(16 D).
  double ground_energy() const {
    const double w = omega();
    return -well_depth + 0.5 * w - w * w / (16.0 * well_depth);
  }
};

inline void validate_morse(const MorseParams& m) {
  if (!(m.well_depth > 0.0) || !(m.alpha > 0.0) || !(m.mass > 0.0))
    throw std::invalid_argument("MorseParams: fields must be positive");
}

inline dvector morse_potential(const SpatialGrid& g, const MorseParams& m) {
  validate_morse(m);
  if (2.0 * m.alpha * std::max(0.0, -g.r_min) > 700.0)
    throw std::invalid_argument(
        "morse_potential: exponential overflows at the inner grid edge");
  dvector v(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double e = std::exp(-m.alpha * g.r[i]);
    v[i] = m.well_depth * (e * e - 2.0 * e);
  }
  return v;
}

// Saturating coupling profile (1 - e^{-a R})/a; linear in R near zero.
inline dvector coupling_profile(const SpatialGrid& g, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("coupling_profile: alpha must be positive");
  if (alpha * std::max(0.0, -g.r_min) > 700.0)
    throw std::invalid_argument(
        "coupling_profile: exponential overflows at the inner grid edge");
  dvector f(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i)
    f[i] = (1.0 - std::exp(-alpha * g.r[i])) / alpha;
  return f;
}

inline dvector harmonic_potential(const SpatialGrid& g, double mass,
                                  double omega0) {
  if (!(mass > 0.0) || !(omega0 > 0.0))
    throw std::invalid_argument("harmonic_potential: mass and omega0 must be positive");
  dvector v(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i)
    v[i] = 0.5 * mass * omega0 * omega0 * g.r[i] * g.r[i];
  return v;
}

inline double grid_norm(const SpatialGrid& g, const cvector& f) {
  double s = 0.0;
  for (const cplx& z : f) s += std::norm(z);
  return std::sqrt(s * g.dr);
}

inline cplx grid_inner(const SpatialGrid& g, const cvector& a,
                       const cvector& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i) s += std::conj(a[i]) * b[i];
  return s * g.dr;
}

// Normalized Gaussian exp(-(R-c)^2/(2 w^2) + i p (R-c)); w is the wave
// function width, so the position standard deviation is w/sqrt(2).
inline cvector gaussian_packet(const SpatialGrid& g, double center,
                               double width, double momentum = 0.0) {
  if (!(width > 0.0))
    throw std::invalid_argument("gaussian_packet: width must be positive");
  if (center < g.r_min || center > g.r_max)
    throw std::invalid_argument("gaussian_packet: center lies outside the grid");
  cvector f(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double x = g.r[i] - center;
    f[i] = std::polar(std::exp(-x * x / (2.0 * width * width)), momentum * x);
  }
  const double nrm = grid_norm(g, f);
  if (!(nrm > 0.0))
    throw std::invalid_argument("gaussian_packet: packet vanishes on the grid");
  for (cplx& z : f) z /= nrm;
  return f;
}

inline cvector displaced_gaussian(const SpatialGrid& g, double center,
                                  double width) {
  return gaussian_packet(g, center, width, 0.0);
}

// T f = IDFT( (k^2/2M) DFT(f) ) / n.
inline cvector apply_kinetic(const SpatialGrid& g, double mass,
                             const cvector& f) {
  if (f.size() != g.n_points)
    throw std::invalid_argument("apply_kinetic: size mismatch");
  if (!(mass > 0.0))
    throw std::invalid_argument("apply_kinetic: mass must be positive");
  RowFft fft(g.n_points);
  dvector scale(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i)
    scale[i] = g.k[i] * g.k[i] / (2.0 * mass) /
               static_cast<double>(g.n_points);
  cvector out(g.n_points);
  apply_spectral_scale_rows(fft, scale.data(), 1, f.data(), out.data());
  return out;
}

}  // namespace spinbath
