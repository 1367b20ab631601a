// Command line front end: simulate, verify, sweep, presets.
#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spinbath/presets.hpp"
#include "spinbath/scenario.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numerical = 2;
constexpr int exit_mismatch = 3;
constexpr double verify_threshold = 1e-8;

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 bool deterministic) {
  spinbath::RunConfig cfg = spinbath::parse_config_file(config_path);
  if (deterministic) cfg.deterministic = true;
  if (cfg.scenario == spinbath::Scenario::verify) {
    const double dev = spinbath::verify_instance_deviation(cfg);
    std::cout << "max oracle deviation " << spinbath::format_g17(dev) << "\n";
    return dev < verify_threshold ? exit_ok : exit_mismatch;
  }
  std::filesystem::path dir = !out_dir.empty()
                                  ? std::filesystem::path(out_dir)
                                  : std::filesystem::path(
                                        cfg.output_dir.value_or("."));
  const spinbath::ScenarioResult res =
      spinbath::run_scenario(cfg, dir, &std::cerr);
  const spinbath::TrajectoryRecord& last = res.trajectory.back();
  std::cout << "completed " << spinbath::to_string(res.resolved.scenario)
            << " run: t = " << last.time_fs << " fs, E_eff = "
            << spinbath::format_g17(last.e_eff) << ", norm = "
            << spinbath::format_g17(last.norm) << "\n"
            << "outputs in " << dir.string() << "\n";
  return exit_ok;
}

int run_verify(int max_n) {
  const spinbath::VerifyReport report = spinbath::run_verify_matrix(max_n);
  for (const std::string& line : report.lines) std::cout << line << "\n";
  std::cout << "max oracle deviation "
            << spinbath::format_g17(report.max_deviation) << "\n";
  return report.max_deviation < verify_threshold ? exit_ok : exit_mismatch;
}

int run_sweep(const std::string& pattern, const std::string& out_base) {
  glob_t hits{};
  const int rc = glob(pattern.c_str(), 0, nullptr, &hits);
  std::vector<std::string> files;
  if (rc == 0)
    for (std::size_t i = 0; i < hits.gl_pathc; ++i)
      files.emplace_back(hits.gl_pathv[i]);
  globfree(&hits);
  if (files.empty()) {
    std::cerr << "sweep: no configuration matches '" << pattern << "'\n";
    return exit_config;
  }
  std::mutex log_mutex;
  std::vector<int> codes(files.size(), exit_ok);
  std::size_t next = 0;
  const std::size_t n_workers = std::min<std::size_t>(
      files.size(), std::max(1u, std::thread::hardware_concurrency()));
  const auto worker = [&] {
    while (true) {
      std::size_t idx;
      {
        std::scoped_lock lock(log_mutex);
        if (next >= files.size()) return;
        idx = next++;
      }
      const std::filesystem::path config_path = files[idx];
      int code = exit_ok;
      std::string message = "ok";
      try {
        const spinbath::RunConfig cfg =
            spinbath::parse_config_file(config_path);
        const std::filesystem::path dir =
            std::filesystem::path(out_base) / config_path.stem();
        spinbath::run_scenario(cfg, dir, nullptr);
      } catch (const spinbath::config_error& e) {
        code = exit_config;
        message = e.what();
      } catch (const spinbath::numerical_error& e) {
        code = exit_numerical;
        message = e.what();
      }
      std::scoped_lock lock(log_mutex);
      codes[idx] = code;
      std::cout << config_path.string() << ": " << message << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative Morse oscillator in a finite two-level bath"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run one configuration file");
  std::string config_path;
  std::string out_dir;
  bool deterministic = false;
  sim->add_option("config", config_path, "Configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_flag("--deterministic", deterministic,
                "Record deterministic mode in the manifest");

  auto* ver = app.add_subcommand("verify",
                                 "Compare the engine against the dense oracle");
  int max_n = 4;
  ver->add_option("--max-n", max_n, "Largest bath size in the matrix");

  auto* sweep = app.add_subcommand("sweep", "Run every matching configuration");
  std::string pattern;
  std::string sweep_out = ".";
  sweep->add_option("glob", pattern, "Configuration file glob")->required();
  sweep->add_option("--out", sweep_out, "Base output directory");

  auto* presets = app.add_subcommand("presets", "Named run configurations");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");
  auto* dump = presets->add_subcommand("dump", "Print one preset");
  std::string preset_name;
  dump->add_option("name", preset_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (sim->parsed()) return run_simulate(config_path, out_dir, deterministic);
    if (ver->parsed()) return run_verify(max_n);
    if (sweep->parsed()) return run_sweep(pattern, sweep_out);
    if (list->parsed()) {
      for (const spinbath::PresetInfo& p : spinbath::preset_list())
        std::cout << p.name << ": " << p.summary << "\n";
      return exit_ok;
    }
    if (dump->parsed()) {
      std::cout << spinbath::serialize_config(
          spinbath::make_preset(preset_name));
      return exit_ok;
    }
  } catch (const spinbath::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const spinbath::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_config;
}
