#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlgt/compile.hpp"
#include "qlgt/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<std::size_t> threads_flag,
            std::optional<std::uint64_t> seed, const std::string& out, bool figure_scale) {
  qlgt::ExperimentConfig config = qlgt::load_config(config_path);
  if (seed) config.master_seed = *seed;
  if (!out.empty()) config.output_dir = out;
  if (figure_scale) config.n_trajectories = qlgt::kFigureTrajectories;
  const std::size_t threads = qlgt::resolve_threads(threads_flag);
  const auto result = qlgt::run_experiment(config, threads);
  qlgt::write_experiment(config, result, threads);
  std::cout << "wrote " << result.series.size() << " series to " << config.output_dir << " in "
            << result.wall_seconds << " s\n";
  return 0;
}

int cmd_verify(const std::string& out) {
  const auto checks = qlgt::run_verify();
  const std::string text = qlgt::checks_to_json_text(checks);
  if (out.empty()) {
    std::cout << text;
  } else {
    qlgt::write_file_atomic(std::filesystem::path(out) / "verify.json", text);
  }
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  return all ? 0 : 1;
}

int cmd_noise_calibrate(const std::vector<double>& gammas, std::size_t dim, std::size_t samples,
                        std::uint64_t seed, const std::string& out) {
  const auto rows = qlgt::noise_calibrate(gammas, dim, samples, seed);
  const std::string text = qlgt::calibration_to_csv(rows);
  if (out.empty()) {
    std::cout << text;
  } else {
    qlgt::write_file_atomic(std::filesystem::path(out) / "noise_calibration.csv", text);
  }
  return 0;
}

int cmd_compile_report(std::size_t n_plaquettes, double inv_g2, double dt,
                       const std::string& out) {
  const std::string report = qlgt::compile_report_json_text(n_plaquettes, {inv_g2}, dt);
  if (out.empty()) {
    std::cout << report;
    return 0;
  }
  const std::filesystem::path dir(out);
  qlgt::write_file_atomic(dir / "resources.json", report);
  const qlgt::FiniteGroup group = qlgt::build_d3();
  const auto geom = qlgt::ladder_geometry(n_plaquettes);
  qlgt::write_file_atomic(
      dir / "trotter_step.gates",
      qlgt::sequence_to_text(qlgt::compile_trotter_step(geom, group, {inv_g2}, dt)));
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (qlgt::Element g = 1; g < group.order(); ++g) {
      qlgt::write_file_atomic(
          dir / ("dps_check_v" + std::to_string(v) + "_g" + std::to_string(g) + ".gates"),
          qlgt::sequence_to_text(qlgt::compile_dps_check(geom, group, v, g).sequence));
    }
  }
  std::cout << "wrote compile report to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-vector simulator for Trotterized D3 lattice gauge theory on periodic ladders"};
  app.require_subcommand(1);

  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto* run = app.add_subcommand("run", "Run an ensemble experiment from a JSON config");
  std::string config_path;
  bool figure_scale = false;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--threads", threads, "Worker threads (overrides QLGT_THREADS)");
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_flag("--figure-scale", figure_scale, "Use 5000 trajectories");

  auto* verify = app.add_subcommand("verify", "Run the built-in invariant checks");
  verify->add_option("--out", out, "Write verify.json here instead of stdout");

  auto* calib = app.add_subcommand("noise-calibrate", "Monte-Carlo check of the Householder mean");
  std::vector<double> gammas{0.0, 0.1, 0.2, 0.3};
  std::size_t dim = 1296, samples = 2000;
  std::uint64_t calib_seed = 1;
  calib->add_option("--gammas", gammas, "Noise strengths")->delimiter(',');
  calib->add_option("--dim", dim, "Hilbert-space dimension");
  calib->add_option("--samples", samples, "Draws per gamma (>= 100)");
  calib->add_option("--seed", calib_seed, "Seed");
  calib->add_option("--out", out, "Write noise_calibration.csv here instead of stdout");

  auto* report = app.add_subcommand("compile-report", "Gate sequences and resource counts");
  std::size_t n_plaquettes = 2;
  double inv_g2 = 0.5, dt = 0.25;
  report->add_option("--n-plaquettes", n_plaquettes, "Ladder size");
  report->add_option("--inv-g2", inv_g2, "1/g^2");
  report->add_option("--dt", dt, "Trotter step dt/a");
  report->add_option("--out", out, "Output directory (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, threads, seed, out, figure_scale);
    if (*verify) return cmd_verify(out);
    if (*calib) return cmd_noise_calibrate(gammas, dim, samples, calib_seed, out);
    if (*report) return cmd_compile_report(n_plaquettes, inv_g2, dt, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
