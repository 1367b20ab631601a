// Run orchestration: resolve a configuration, build the model, propagate,
// and stream observables to CSV files.
#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/bath.hpp"
#include "spinbath/config.hpp"
#include "spinbath/entanglement.hpp"
#include "spinbath/grid.hpp"
#include "spinbath/hamiltonian.hpp"
#include "spinbath/observables.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/propagator.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

inline constexpr double edge_abort_probability = 1e-8;

// Configuration with every scenario-dependent default filled in.
inline RunConfig resolve_config(const RunConfig& cfg) {
  validate_config(cfg);
  RunConfig r = cfg;
  const bool cat = r.scenario == Scenario::catstate;
  if (!r.grid_min) {
    r.grid_min = cat ? -1.0 : -0.4;
    r.grid_max = cat ? 1.0 : 1.2;
  }
  if (!r.grid_points)
    r.grid_points = r.scenario == Scenario::verify ? std::size_t{32}
                                                   : std::size_t{256};
  if (!r.initial_state)
    r.initial_state = cat ? InitialState::cat_state
                          : InitialState::displaced_gaussian;
  MorseParams morse{r.well_depth, r.morse_alpha, r.mass};
  if (!r.displacement) r.displacement = 2.0 * morse.r_tilde();
  if (!r.width) r.width = morse.r_tilde();
  return r;
}

namespace detail {

inline std::size_t integer_ratio(double value, double step,
                                 const char* what) {
  const double ratio = value / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded))
    throw config_error(std::string("config: ") + what);
  return static_cast<std::size_t>(rounded);
}

}  // namespace detail

struct ScenarioResult {
  RunConfig resolved;
  std::vector<TrajectoryRecord> trajectory;
  std::vector<EntanglementSummary> entanglement;
  double max_edge_probability = 0.0;
  double wall_seconds = 0.0;
  std::filesystem::path manifest_path;
  std::filesystem::path trajectory_path;
  std::filesystem::path entanglement_path;
  std::filesystem::path pairs_path;
};

inline SpinorState build_initial_state(const RunConfig& r,
                                       const HamiltonianSpec& h) {
  switch (r.initial_state.value()) {
    case InitialState::displaced_gaussian:
      return make_product_state(
          h.grid, h.space,
          gaussian_packet(h.grid, *r.displacement, *r.width));
    case InitialState::correlated_ground: {
      const SpinorState guess = make_product_state(
          h.grid, h.space, gaussian_packet(h.grid, 0.0, *r.width));
      const SpinorState ground = relax_imaginary_time(
          h, guess, r.imag_tau_step_au, r.imag_tolerance);
      return displace(ground, *r.displacement);
    }
    case InitialState::cat_state: {
      const CatStateBasis basis =
          make_cat_basis(h.grid, r.mass, r.cat_omega0, r.cat_delta, r.cat_p0);
      return build_cat_state(h.grid, h.space, basis);
    }
  }
  throw config_error("config: unsupported initial state");
}

// Propagates one resolved configuration and streams its outputs under
// `out_dir`.  Throws config_error or numerical_error; partial CSV rows are
// flushed before a numerical abort.
inline ScenarioResult run_scenario(const RunConfig& cfg,
                                   const std::filesystem::path& out_dir,
                                   std::ostream* log = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  ScenarioResult res;
  RunConfig r = resolve_config(cfg);
  r.output_dir = out_dir.string();
  res.resolved = r;

  const SpatialGrid grid = build_grid(*r.grid_min, *r.grid_max,
                                      *r.grid_points);
  const MorseParams morse{r.well_depth, r.morse_alpha, r.mass};
  const BathSpec bath =
      sample_ohmic_bath(r.n_modes, r.omega_cutoff, r.gamma_au.value(), r.mass,
                        r.kappa, r.bath_sampling);
  const ConfigurationSpace space =
      build_configuration_space(r.n_modes, r.n_exc);
  const bool cat = r.scenario == Scenario::catstate;
  std::optional<dvector> potential;
  if (cat) potential = harmonic_potential(grid, r.mass, r.cat_omega0);
  const HamiltonianSpec h = build_hamiltonian(
      grid, morse, bath, space, potential ? &*potential : nullptr);

  std::filesystem::create_directories(out_dir);
  res.manifest_path = out_dir / "run_manifest.cfg";
  {
    std::ofstream manifest(res.manifest_path);
    if (!manifest)
      throw config_error("run_scenario: cannot write " +
                         res.manifest_path.string());
    manifest << serialize_config(r);
  }

  const std::size_t steps_per_sample = detail::integer_ratio(
      r.sample_interval_fs, r.dt_fs,
      "sample_interval must be a positive integer multiple of dt");
  const std::size_t n_samples = detail::integer_ratio(
      r.t_final_fs, r.sample_interval_fs,
      "t_final must be a positive integer multiple of sample_interval");
  const bool entangle = r.scenario == Scenario::entangle;
  std::size_t ent_every = 0;
  if (entangle)
    ent_every = detail::integer_ratio(
        r.entanglement_interval_fs, r.sample_interval_fs,
        "entanglement_interval must be a positive integer multiple of "
        "sample_interval");

  SpinorState psi = build_initial_state(r, h);

  // Pointer-state reference for the cat scenario: the relaxed joint ground
  // state of the same well and bath.
  std::optional<ReducedDensityMatrix> rho_eq;
  if (cat) {
    const SpinorState guess = make_product_state(
        grid, space,
        gaussian_packet(grid, 0.0, 1.0 / std::sqrt(r.mass * r.cat_omega0)));
    const SpinorState eq = relax_imaginary_time(h, guess, r.imag_tau_step_au,
                                                r.imag_tolerance);
    rho_eq = reduce_system_density(eq);
  }

  res.trajectory_path = out_dir / "trajectory.csv";
  std::ofstream traj(res.trajectory_path);
  if (!traj)
    throw config_error("run_scenario: cannot write " +
                       res.trajectory_path.string());
  traj << "# trajectory-csv v1\n"
       << trajectory_csv_header(r.n_modes, cat) << "\n";

  std::ofstream ent_file, pairs_file;
  std::optional<PairCorrelations> corr;
  if (entangle) {
    res.entanglement_path = out_dir / "entanglement.csv";
    ent_file.open(res.entanglement_path);
    if (!ent_file)
      throw config_error("run_scenario: cannot write " +
                         res.entanglement_path.string());
    ent_file << "# entanglement-csv v1\n"
             << "time_fs,mean_lambda0,entangled_fraction,mean_eof\n";
    if (r.per_pair_output) {
      res.pairs_path = out_dir / "entanglement_pairs.csv";
      pairs_file.open(res.pairs_path);
      if (!pairs_file)
        throw config_error("run_scenario: cannot write " +
                           res.pairs_path.string());
      pairs_file << "# entanglement-pairs-csv v1\n"
                 << "time_fs,i,j,lambda0,W1,W2,C,E\n";
    }
    corr.emplace(space);
  }

  const ChebychevPlan plan =
      build_chebychev_plan(h, fs_to_au(r.dt_fs), r.cheb_tolerance);
  ChebWorkspace ws;

  const auto sample = [&](std::size_t s) {
    const double t_fs = static_cast<double>(s) * r.sample_interval_fs;
    TrajectoryRecord rec = sample_trajectory(h, psi, t_fs);
    if (cat) {
      const ReducedDensityMatrix rho = reduce_system_density(psi);
      const CatStateBasis basis =
          make_cat_basis(grid, r.mass, r.cat_omega0, r.cat_delta, r.cat_p0,
                         fs_to_au(t_fs));
      rec.n_coh = coherence_norm(rho, basis);
      const PointerWeights w = pointer_decomposition(rho, *rho_eq);
      rec.c2 = w.c2;
      rec.tr_rho_coh2 = w.tr_rho_coh2;
    }
    res.trajectory.push_back(rec);
    traj << trajectory_csv_row(rec) << "\n";
    traj.flush();
    if (entangle && s % ent_every == 0) {
      corr->update(psi);
      std::vector<PairEntanglementRecord> per_pair;
      const EntanglementSummary summary = summarize_pairs(
          *corr, space, t_fs, r.per_pair_output ? &per_pair : nullptr);
      res.entanglement.push_back(summary);
      ent_file << format_g17(summary.time_fs) << ','
               << format_g17(summary.mean_lambda0) << ','
               << format_g17(summary.entangled_fraction) << ','
               << format_g17(summary.mean_eof) << "\n";
      ent_file.flush();
      for (const PairEntanglementRecord& p : per_pair) {
        pairs_file << format_g17(summary.time_fs) << ',' << p.mode_i << ','
                   << p.mode_j << ',' << format_g17(p.lambda0) << ','
                   << format_g17(p.w1) << ',' << format_g17(p.w2) << ','
                   << format_g17(p.concurrence) << ',' << format_g17(p.eof)
                   << "\n";
      }
      if (r.per_pair_output) pairs_file.flush();
    }
    const double edge = edge_probability(psi);
    res.max_edge_probability = std::max(res.max_edge_probability, edge);
    if (edge > edge_abort_probability)
      throw numerical_error(
          "run_scenario: wave function reached the grid edge (probability " +
          format_g17(edge) + ") at t = " + format_g17(t_fs) + " fs");
  };

  sample(0);
  for (std::size_t s = 1; s <= n_samples; ++s) {
    propagate_in_place(plan, h, psi, steps_per_sample, ws);
    sample(s);
    if (log != nullptr && (s % std::max<std::size_t>(1, n_samples / 10) == 0))
      *log << "t = " << res.trajectory.back().time_fs
           << " fs, E_eff = " << res.trajectory.back().e_eff
           << ", norm = " << res.trajectory.back().norm << "\n";
  }

  res.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
  return res;
}

struct VerifyReport {
  double max_deviation = 0.0;
  std::vector<std::string> lines;
};

// Engine-versus-oracle amplitude deviation after 500 a.u. of coupled
// evolution on one untruncated instance.
inline double verify_instance_deviation(const RunConfig& cfg) {
  RunConfig r = resolve_config(cfg);
  const SpatialGrid grid =
      build_grid(*r.grid_min, *r.grid_max, *r.grid_points);
  const MorseParams morse{r.well_depth, r.morse_alpha, r.mass};
  const BathSpec bath =
      sample_ohmic_bath(r.n_modes, r.omega_cutoff, r.gamma_au.value(), r.mass,
                        r.kappa, r.bath_sampling);
  const ConfigurationSpace space =
      build_configuration_space(r.n_modes, r.n_modes);
  const HamiltonianSpec h = build_hamiltonian(grid, morse, bath, space);
  const SpinorState psi0 = make_product_state(
      grid, space, gaussian_packet(grid, *r.displacement, *r.width));

  constexpr double t_total = 500.0;  // a.u.
  constexpr double dt = 20.0;        // a.u.
  const ChebychevPlan plan = build_chebychev_plan(h, dt, 1e-12);
  const SpinorState evolved =
      propagate(plan, h, psi0, static_cast<std::size_t>(t_total / dt));

  const oracle::DenseInstance inst = oracle::build_dense(grid, morse, bath);
  const Eigen::VectorXcd exact =
      oracle::exact_propagate(inst, oracle::state_to_vector(psi0), t_total);
  double dev = 0.0;
  for (std::size_t i = 0; i < evolved.amp.size(); ++i)
    dev = std::max(dev,
                   std::abs(evolved.amp[i] -
                            exact(static_cast<Eigen::Index>(i))));
  return dev;
}

inline VerifyReport run_verify_matrix(int max_n) {
  if (max_n < 1 || max_n > 6)
    throw config_error("verify: max-n must be in [1, 6]");
  VerifyReport report;
  for (int n_modes = 1; n_modes <= max_n; ++n_modes) {
    for (const std::size_t points : {std::size_t{16}, std::size_t{32}}) {
      for (const double inv_fs : {1630.0, 163.0, 54.0}) {
        RunConfig cfg;
        cfg.scenario = Scenario::verify;
        cfg.n_modes = n_modes;
        cfg.n_exc = n_modes;
        cfg.gamma_au = fs_per_au / inv_fs;
        cfg.grid_points = points;
        const double dev = verify_instance_deviation(cfg);
        report.max_deviation = std::max(report.max_deviation, dev);
        report.lines.push_back(
            "N = " + std::to_string(n_modes) +
            ", n_points = " + std::to_string(points) +
            ", 1/gamma = " + format_g17(inv_fs) +
            " fs: max amplitude deviation " + format_g17(dev));
      }
    }
  }
  return report;
}

}  // namespace spinbath
