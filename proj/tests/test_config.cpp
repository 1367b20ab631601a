#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinbath/presets.hpp"
#include "spinbath/scenario.hpp"

using namespace spinbath;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* minimal = "scenario = relax\ngamma_inv = 163 fs\n";

}  // namespace

TEST_CASE("configuration text parses with units") {
  const RunConfig cfg = parse_config(
      "# a comment line\n"
      "scenario = entangle\n"
      "n_modes = 12   # trailing comment\n"
      "n_exc = 2\n"
      "gamma_inv = 163 fs\n"
      "kappa = 1.5e-4 au\n"
      "t_final = 900 fs\n"
      "dt = 0.5 fs\n"
      "sample_interval = 82.6827475791215 au\n"
      "per_pair_output = true\n"
      "omega_cutoff = 2.9e-3 au\n");
  CHECK(cfg.scenario == Scenario::entangle);
  CHECK(cfg.n_modes == 12);
  CHECK(cfg.n_exc == 2);
  CHECK(cfg.gamma_au.value() ==
        Catch::Approx(1.4839780981595093e-4).epsilon(1e-15));
  CHECK(cfg.kappa == 1.5e-4);
  CHECK(cfg.t_final_fs == 900.0);
  // 82.68... au is exactly 2 fs.
  CHECK(cfg.sample_interval_fs == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(cfg.per_pair_output);
  CHECK(cfg.omega_cutoff == 2.9e-3);
}

TEST_CASE("malformed configurations are rejected with reasons") {
  CHECK_THROWS_AS(parse_config("scenario = relax\n"), config_error);
  CHECK_THROWS_AS(parse_config("bogus_key = 1\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config("gamma = 1e-5 au\ngamma = 2e-5 au\n"), config_error);
  CHECK_THROWS_AS(
      parse_config("gamma = 1e-5 au\ngamma_inv = 163 fs\n"), config_error);
  CHECK_THROWS_AS(parse_config("gamma 1e-5 au\n"), config_error);
  CHECK_THROWS_AS(parse_config("gamma = 1e-5\n"), config_error);
  CHECK_THROWS_AS(parse_config("gamma = 1e-5 fs\n"), config_error);
  CHECK_THROWS_AS(parse_config("t_final = soon fs\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config("scenario = maybe\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config("per_pair_output = yes\ngamma = 1e-5 au\n"), config_error);
  CHECK_THROWS_AS(parse_config("gamma = -1e-5 au\n"), config_error);
  CHECK_THROWS_AS(parse_config("n_modes = 64\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config("n_modes = 0\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config("n_modes = 4\nn_exc = 5\ngamma = 1e-5 au\n"), config_error);
  CHECK_THROWS_AS(
      parse_config("grid_points = 100\ngamma = 1e-5 au\n"), config_error);
  CHECK_THROWS_AS(
      parse_config("grid_min = -0.4 au\ngamma = 1e-5 au\n"), config_error);
  CHECK_THROWS_AS(
      parse_config("grid_min = 1 au\ngrid_max = -1 au\ngamma = 1e-5 au\n"),
      config_error);
  CHECK_THROWS_AS(parse_config("dt = -0.5 fs\ngamma = 1e-5 au\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config("gamma_inv = 0 fs\n"), config_error);
  CHECK_THROWS_AS(parse_config("cheb_tolerance = 1.5\ngamma = 1e-5 au\n"),
                  config_error);
}

TEST_CASE("serialized form reparses to identical values") {
  RunConfig cfg = parse_config(minimal);
  cfg.scenario = Scenario::catstate;
  cfg.gamma_au = 1.0 / 3.0e4;
  cfg.kappa = 1.5e-4;
  cfg.n_modes = 17;
  cfg.n_exc = 3;
  cfg.grid_min = -0.8;
  cfg.grid_max = 0.8;
  cfg.grid_points = 128;
  cfg.initial_state = InitialState::cat_state;
  cfg.displacement = 0.1 / 3.0;
  cfg.width = 0.09128709291752768;
  cfg.t_final_fs = 400.0 / 7.0;
  cfg.dt_fs = 0.1 / 3.0;
  cfg.sample_interval_fs = 0.2 / 3.0;
  cfg.bath_sampling = BathSampling::centers;
  cfg.per_pair_output = true;
  cfg.output_dir = "somewhere/else";
  cfg.seed = -12345;

  const std::string text = serialize_config(cfg);
  const RunConfig back = parse_config(text);
  CHECK(back.scenario == cfg.scenario);
  CHECK(back.gamma_au.value() == cfg.gamma_au.value());
  CHECK(back.kappa == cfg.kappa);
  CHECK(back.n_modes == cfg.n_modes);
  CHECK(back.n_exc == cfg.n_exc);
  CHECK(back.grid_min.value() == cfg.grid_min.value());
  CHECK(back.grid_max.value() == cfg.grid_max.value());
  CHECK(back.grid_points.value() == cfg.grid_points.value());
  CHECK(back.initial_state.value() == cfg.initial_state.value());
  CHECK(back.displacement.value() == cfg.displacement.value());
  CHECK(back.width.value() == cfg.width.value());
  CHECK(back.t_final_fs == cfg.t_final_fs);
  CHECK(back.dt_fs == cfg.dt_fs);
  CHECK(back.sample_interval_fs == cfg.sample_interval_fs);
  CHECK(back.bath_sampling == cfg.bath_sampling);
  CHECK(back.per_pair_output == cfg.per_pair_output);
  CHECK(back.output_dir.value() == cfg.output_dir.value());
  CHECK(back.seed == cfg.seed);
  // A second pass is a fixed point.
  CHECK(serialize_config(back) == text);
  // Atomic-unit equivalents ride along for every femtosecond key.
  CHECK(text.find("# t_final_au = ") != std::string::npos);
  CHECK(text.find("# dt_au = ") != std::string::npos);
  CHECK(text.find("# gamma_inv_fs = ") != std::string::npos);
}

TEST_CASE("presets are complete and valid") {
  const std::vector<PresetInfo> list = preset_list();
  REQUIRE(list.size() == 9);
  for (const PresetInfo& info : list) {
    const RunConfig cfg = make_preset(info.name);
    CHECK_NOTHROW(validate_config(cfg));
    CHECK_NOTHROW(resolve_config(cfg));
  }
  CHECK_THROWS_AS(make_preset("nonsense"), config_error);

  const RunConfig weak = make_preset("weak");
  CHECK(weak.scenario == Scenario::relax);
  CHECK(weak.n_modes == 60);
  CHECK(weak.n_exc == 2);
  CHECK(weak.gamma_au.value() ==
        Catch::Approx(1.4839780981595093e-5).epsilon(1e-15));
  CHECK(weak.t_final_fs == 2000.0);

  const RunConfig strong = make_preset("strong");
  CHECK(strong.n_modes == 20);
  CHECK(strong.n_exc == 5);
  CHECK(strong.gamma_au.value() ==
        Catch::Approx(4.4794153703703706e-4).epsilon(1e-15));

  const RunConfig kappa = make_preset("weak-kappa");
  CHECK(kappa.kappa == 1.5e-4);
  CHECK(kappa.t_final_fs == 3000.0);

  const RunConfig cat = make_preset("catstate-500");
  CHECK(cat.scenario == Scenario::catstate);
  CHECK(cat.initial_state.value() == InitialState::cat_state);
  CHECK(cat.cat_omega0 == 1.0e-3);
  CHECK(cat.cat_delta == 0.5);
  CHECK(cat.grid_min.value() == -1.0);
}

TEST_CASE("resolution fills scenario-dependent defaults") {
  RunConfig cfg = parse_config(minimal);

  SECTION("relaxation defaults") {
    const RunConfig r = resolve_config(cfg);
    CHECK(r.grid_min.value() == -0.4);
    CHECK(r.grid_max.value() == 1.2);
    CHECK(r.grid_points.value() == 256);
    CHECK(r.initial_state.value() == InitialState::displaced_gaussian);
    CHECK(r.displacement.value() ==
          Catch::Approx(0.18257418583505536).epsilon(1e-15));
    CHECK(r.width.value() ==
          Catch::Approx(0.09128709291752768).epsilon(1e-15));
  }

  SECTION("superposition defaults") {
    cfg.scenario = Scenario::catstate;
    const RunConfig r = resolve_config(cfg);
    CHECK(r.grid_min.value() == -1.0);
    CHECK(r.grid_max.value() == 1.0);
    CHECK(r.initial_state.value() == InitialState::cat_state);
  }

  SECTION("verification defaults") {
    cfg.scenario = Scenario::verify;
    const RunConfig r = resolve_config(cfg);
    CHECK(r.grid_points.value() == 32);
  }

  SECTION("explicit values win") {
    cfg.grid_min = -1.0;
    cfg.grid_max = 2.0;
    cfg.grid_points = 64;
    cfg.initial_state = InitialState::correlated_ground;
    const RunConfig r = resolve_config(cfg);
    CHECK(r.grid_min.value() == -1.0);
    CHECK(r.grid_max.value() == 2.0);
    CHECK(r.grid_points.value() == 64);
    CHECK(r.initial_state.value() == InitialState::correlated_ground);
  }
}

TEST_CASE("a short run streams reproducible outputs") {
  RunConfig cfg = parse_config(
      "scenario = relax\n"
      "n_modes = 2\n"
      "n_exc = 1\n"
      "gamma_inv = 163 fs\n"
      "t_final = 20 fs\n"
      "dt = 0.5 fs\n"
      "sample_interval = 5 fs\n");
  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "spinbath_cfg_test";
  std::filesystem::remove_all(base);
  const std::filesystem::path dir1 = base / "run1";
  const ScenarioResult res = run_scenario(cfg, dir1);

  REQUIRE(std::filesystem::exists(res.manifest_path));
  REQUIRE(std::filesystem::exists(res.trajectory_path));
  REQUIRE(res.trajectory.size() == 5);
  CHECK(res.trajectory.front().time_fs == 0.0);
  CHECK(res.trajectory.back().time_fs == 20.0);
  CHECK(res.trajectory.back().norm == Catch::Approx(1.0).epsilon(1e-10));
  CHECK(res.max_edge_probability < edge_abort_probability);
  // The bath starts empty and picks up weight through the coupling.
  for (double p : res.trajectory.front().populations) CHECK(p == 0.0);
  CHECK(res.trajectory.back().populations.at(0) +
            res.trajectory.back().populations.at(1) >
        1e-12);

  const std::string traj1 = slurp(res.trajectory_path);
  CHECK(traj1.rfind("# trajectory-csv v1\n", 0) == 0);
  CHECK(traj1.find("time_fs,mean_R_au,E_bare_au,E_eff_au,norm,pop_1,pop_2\n") !=
        std::string::npos);

  SECTION("the manifest reproduces the run byte for byte") {
    const RunConfig reloaded = parse_config_file(res.manifest_path);
    const ScenarioResult res2 = run_scenario(reloaded, base / "run2");
    CHECK(slurp(res2.trajectory_path) == traj1);
  }

  SECTION("pair summaries appear only for the entangling scenario") {
    RunConfig ent = cfg;
    ent.scenario = Scenario::entangle;
    ent.entanglement_interval_fs = 5.0;
    ent.per_pair_output = true;
    const ScenarioResult res3 = run_scenario(ent, base / "run3");
    REQUIRE(std::filesystem::exists(res3.entanglement_path));
    REQUIRE(std::filesystem::exists(res3.pairs_path));
    REQUIRE(res3.entanglement.size() == 5);
    CHECK(res3.entanglement.front().entangled_fraction == 0.0);
    const std::string pairs = slurp(res3.pairs_path);
    CHECK(pairs.find("time_fs,i,j,lambda0,W1,W2,C,E\n") != std::string::npos);
  }

  std::filesystem::remove_all(base);
}

TEST_CASE("misaligned intervals are rejected") {
  RunConfig cfg = parse_config(minimal);
  cfg.n_modes = 2;
  cfg.n_exc = 1;
  cfg.t_final_fs = 10.0;
  cfg.dt_fs = 3.0;
  cfg.sample_interval_fs = 5.0;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "spinbath_cfg_bad";
  CHECK_THROWS_AS(run_scenario(cfg, dir), config_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("one small verification instance stays under tolerance") {
  RunConfig cfg = parse_config(minimal);
  cfg.scenario = Scenario::verify;
  cfg.n_modes = 1;
  cfg.n_exc = 1;
  cfg.grid_points = 16;
  const double dev = verify_instance_deviation(cfg);
  CHECK(dev < 1e-8);
  CHECK(dev > 0.0);
}
