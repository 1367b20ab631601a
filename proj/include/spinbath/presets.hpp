// Named run configurations mirroring the standard study protocols.
#pragma once

#include <string>
#include <vector>

#include "spinbath/config.hpp"

namespace spinbath {

struct PresetInfo {
  std::string name;
  std::string summary;
};

inline std::vector<PresetInfo> preset_list() {
  return {
      {"weak", "relaxation, N = 60, N_exc = 2, 1/gamma = 1630 fs, 2 ps"},
      {"medium", "relaxation, N = 40, N_exc = 2, 1/gamma = 163 fs, 900 fs"},
      {"strong", "relaxation, N = 20, N_exc = 5, 1/gamma = 54 fs, 900 fs"},
      {"weak-kappa",
       "weak bath with mode hopping kappa = 1.5e-4, N_exc = 2, 3 ps"},
      {"catstate-1630", "cat-state decoherence, 1/gamma = 1630 fs, 400 fs"},
      {"catstate-500", "cat-state decoherence, 1/gamma = 500 fs, 200 fs"},
      {"entangle-1630", "pair entanglement, N = 40, 1/gamma = 1630 fs"},
      {"entangle-500", "pair entanglement, N = 40, 1/gamma = 500 fs"},
      {"entangle-163", "pair entanglement, N = 40, 1/gamma = 163 fs"},
  };
}

namespace detail {

// At 1/gamma <= 163 fs the bath kicks the packet hard enough that its
// tails pass 1e-8 at the default box edges within ~50 fs; the wider box
// holds them with orders of magnitude to spare. The entangle presets all
// share it so their three runs differ only in gamma.
inline void set_wide_box(RunConfig& cfg) {
  cfg.grid_min = -0.6;
  cfg.grid_max = 1.6;
  cfg.grid_points = 256;
}

}  // namespace detail

inline RunConfig make_preset(const std::string& name) {
  RunConfig cfg;
  // The polynomial order grows with dt, so longer steps cost nearly the
  // same per unit time; 2 fs keeps the order moderate and the sampling
  // grid convenient.
  cfg.dt_fs = 2.0;
  cfg.sample_interval_fs = 4.0;
  const auto gamma_from_inv_fs = [](double inv_fs) {
    return fs_per_au / inv_fs;
  };
  if (name == "weak") {
    cfg.scenario = Scenario::relax;
    cfg.n_modes = 60;
    cfg.n_exc = 2;
    cfg.gamma_au = gamma_from_inv_fs(1630.0);
    cfg.t_final_fs = 2000.0;
  } else if (name == "medium") {
    cfg.scenario = Scenario::relax;
    cfg.n_modes = 40;
    cfg.n_exc = 2;
    cfg.gamma_au = gamma_from_inv_fs(163.0);
    cfg.t_final_fs = 900.0;
    detail::set_wide_box(cfg);
  } else if (name == "strong") {
    cfg.scenario = Scenario::relax;
    cfg.n_modes = 20;
    cfg.n_exc = 5;
    cfg.gamma_au = gamma_from_inv_fs(54.0);
    cfg.t_final_fs = 900.0;
    detail::set_wide_box(cfg);
  } else if (name == "weak-kappa") {
    cfg.scenario = Scenario::relax;
    cfg.n_modes = 60;
    cfg.n_exc = 2;
    cfg.gamma_au = gamma_from_inv_fs(1630.0);
    cfg.kappa = 1.5e-4;
    cfg.t_final_fs = 3000.0;
  } else if (name == "catstate-1630" || name == "catstate-500") {
    cfg.scenario = Scenario::catstate;
    cfg.n_modes = 60;
    cfg.n_exc = 2;
    const double inv = name == "catstate-1630" ? 1630.0 : 500.0;
    cfg.gamma_au = gamma_from_inv_fs(inv);
    cfg.t_final_fs = name == "catstate-1630" ? 400.0 : 200.0;
    cfg.initial_state = InitialState::cat_state;
    // Wide box: bath recoil puts faint sidebands well outside the classical
    // +-delta/2 swing of the two branches.
    cfg.grid_min = -1.0;
    cfg.grid_max = 1.0;
    cfg.grid_points = 256;
    cfg.sample_interval_fs = 2.0;
    // Deep relaxation is only needed once, for the pointer reference.
    cfg.imag_tau_step_au = 50.0;
  } else if (name == "entangle-1630" || name == "entangle-500" ||
             name == "entangle-163") {
    cfg.scenario = Scenario::entangle;
    cfg.n_modes = 40;
    cfg.n_exc = 2;
    const double inv = name == "entangle-1630" ? 1630.0
                       : name == "entangle-500" ? 500.0
                                                : 163.0;
    cfg.gamma_au = gamma_from_inv_fs(inv);
    cfg.t_final_fs = 900.0;
    cfg.entanglement_interval_fs = 4.0;
    detail::set_wide_box(cfg);
  } else {
    throw config_error("presets: unknown preset '" + name + "'");
  }
  return cfg;
}

}  // namespace spinbath
