#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlgt/analysis.hpp"
#include "qlgt/evolve.hpp"

namespace qlgt {

inline constexpr std::size_t kDefaultTrajectories = 500;
inline constexpr std::size_t kFigureTrajectories = 5000;

struct ExperimentConfig {
  std::size_t n_plaquettes = 2;
  double inv_g2 = 0.5;
  double dt = 0.25;
  std::size_t n_steps = 60;
  NoiseSpec noise{NoiseKind::householder, 0.2};
  std::vector<Mode> modes{Mode::noiseless, Mode::noisy, Mode::dps, Mode::psv};
  std::size_t n_trajectories = kDefaultTrajectories;
  std::uint64_t master_seed = 1;
  /// Reuse trajectory streams across noisy and DPS runs.
  bool paired = true;
  bool continue_after_failure = false;
  MeasurementSchedule schedule;  // empty: default
  std::string group_file;        // empty: built-in D3
  std::string output_dir = "out";

  bool has_mode(Mode m) const;
};

/// Parses a JSON document. Unknown keys and invalid values throw std::invalid_argument.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const ExperimentConfig& config);
/// Throws std::invalid_argument (or std::length_error for the size guard).
void validate_config(const ExperimentConfig& config);

FiniteGroup config_group(const ExperimentConfig& config);

/// Thread count: the flag if positive, else QLGT_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::optional<std::size_t> flag);

/// Runs `count` trajectories on a worker pool; the result is ordered by index.
std::vector<TrajectoryRecord> run_ensemble(const SimulationModel& model,
                                           const TrajectoryOptions& options, std::size_t count,
                                           std::size_t threads);

struct ExperimentResult {
  std::map<Mode, ModeSeries> series;
  double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads);

/// CSV for one mode with the stable column schema.
std::string series_to_csv(const ModeSeries& series, const LatticeGeometry& geom,
                          const FiniteGroup& group);

/// Writes `text` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Writes <out>/<mode>.csv and <out>/manifest.json.
void write_experiment(const ExperimentConfig& config, const ExperimentResult& result,
                      std::size_t threads);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Built-in invariant suite.
std::vector<CheckResult> run_verify();
std::string checks_to_json_text(const std::vector<CheckResult>& checks);

struct CalibrationRow {
  double gamma = 0.0;
  double analytic = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo mean of Re Tr(U)/dim over Householder samples.
std::vector<CalibrationRow> noise_calibrate(const std::vector<double>& gammas, std::size_t dim,
                                            std::size_t samples, std::uint64_t seed);
std::string calibration_to_csv(const std::vector<CalibrationRow>& rows);

/// Resource report JSON for the Trotter step, each plaquette, and every DPS check.
std::string compile_report_json_text(std::size_t n_plaquettes, const CouplingParams& coupling,
                                     double dt);

}  // namespace qlgt
