#include "qlgt/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qlgt/compile.hpp"

#ifndef QLGT_GIT_HASH
#define QLGT_GIT_HASH "unknown"
#endif

namespace qlgt {

using nlohmann::json;
using nlohmann::ordered_json;

bool ExperimentConfig::has_mode(Mode m) const {
  for (Mode x : modes) {
    if (x == m) return true;
  }
  return false;
}

namespace {

const char* const kConfigKeys[] = {"n_plaquettes", "inv_g2",  "dt",
                                   "n_steps",      "noise",   "modes",
                                   "n_trajectories", "master_seed", "paired",
                                   "continue_after_failure", "schedule", "group_file",
                                   "output_dir"};

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) throw std::invalid_argument("config: unknown key '" + where + item.key() + "'");
  }
}

template <typename T>
T get_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : kConfigKeys) ok = ok || item.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }

  ExperimentConfig c;
  c.n_plaquettes = get_field(doc, "n_plaquettes", c.n_plaquettes);
  c.inv_g2 = get_field(doc, "inv_g2", c.inv_g2);
  c.dt = get_field(doc, "dt", c.dt);
  c.n_steps = get_field(doc, "n_steps", c.n_steps);
  c.n_trajectories = get_field(doc, "n_trajectories", c.n_trajectories);
  c.master_seed = get_field(doc, "master_seed", c.master_seed);
  c.paired = get_field(doc, "paired", c.paired);
  c.continue_after_failure = get_field(doc, "continue_after_failure", c.continue_after_failure);
  c.group_file = get_field(doc, "group_file", c.group_file);
  c.output_dir = get_field(doc, "output_dir", c.output_dir);
  if (doc.contains("noise")) {
    const json& n = doc.at("noise");
    if (!n.is_object()) throw std::invalid_argument("config: 'noise' must be an object");
    reject_unknown(n, {"kind", "gamma"}, "noise.");
    c.noise.kind = parse_noise_kind(get_field(n, "kind", to_string(c.noise.kind)));
    c.noise.gamma = get_field(n, "gamma", c.noise.gamma);
  }
  if (doc.contains("modes")) {
    c.modes.clear();
    for (const auto& m : get_field(doc, "modes", std::vector<std::string>{})) {
      c.modes.push_back(parse_mode(m));
    }
  }
  if (doc.contains("schedule")) {
    for (const auto& e : get_field(doc, "schedule", std::vector<std::vector<std::size_t>>{})) {
      if (e.size() != 2) throw std::invalid_argument("config: schedule entries are [vertex, element]");
      c.schedule.entries.push_back({e[0], e[1]});
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& c) {
  ordered_json doc;
  doc["n_plaquettes"] = c.n_plaquettes;
  doc["inv_g2"] = c.inv_g2;
  doc["dt"] = c.dt;
  doc["n_steps"] = c.n_steps;
  doc["noise"] = {{"kind", to_string(c.noise.kind)}, {"gamma", c.noise.gamma}};
  std::vector<std::string> modes;
  for (Mode m : c.modes) modes.push_back(to_string(m));
  doc["modes"] = modes;
  doc["n_trajectories"] = c.n_trajectories;
  doc["master_seed"] = c.master_seed;
  doc["paired"] = c.paired;
  doc["continue_after_failure"] = c.continue_after_failure;
  json sched = json::array();
  for (const auto& e : c.schedule.entries) sched.push_back({e.vertex, e.element});
  doc["schedule"] = sched;
  doc["group_file"] = c.group_file;
  doc["output_dir"] = c.output_dir;
  return doc.dump(2);
}

void validate_config(const ExperimentConfig& c) {
  if (c.n_plaquettes < 2) throw std::invalid_argument("config: n_plaquettes must be >= 2");
  if (!(c.dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
  if (!(c.inv_g2 > 0.0)) throw std::invalid_argument("config: inv_g2 must be > 0");
  if (c.n_steps < 1) throw std::invalid_argument("config: n_steps must be >= 1");
  if (c.n_trajectories < 1) throw std::invalid_argument("config: n_trajectories must be >= 1");
  if (!(c.noise.gamma >= 0.0)) throw std::invalid_argument("config: noise gamma must be >= 0");
  if (c.modes.empty()) throw std::invalid_argument("config: at least one mode is required");
  if (c.output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
  const FiniteGroup group = config_group(c);
  const LatticeGeometry geom = ladder_geometry(c.n_plaquettes);
  std::size_t dim = 1;
  for (std::size_t l = 0; l < geom.n_links(); ++l) {
    if (dim > (std::size_t{1} << 40) / group.order()) {
      throw std::length_error("config: register dimension is too large for a state vector");
    }
    dim *= group.order();
  }
  check_noise_allowed(c.noise, dim);
  if (!c.schedule.entries.empty()) validate_schedule(c.schedule, geom, group);
}

FiniteGroup config_group(const ExperimentConfig& config) {
  return config.group_file.empty() ? build_d3() : load_group_json(config.group_file);
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("QLGT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrajectoryRecord> run_ensemble(const SimulationModel& model,
                                           const TrajectoryOptions& options, std::size_t count,
                                           std::size_t threads) {
  std::vector<TrajectoryRecord> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = run_trajectory(model, options, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(threads, 1), count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const SimulationModel model(config_group(config), config.n_plaquettes, {config.inv_g2},
                              config.dt);
  const auto gv_norm = gv_normalizations(model.geometry(), model.group());

  TrajectoryOptions base;
  base.n_steps = config.n_steps;
  base.schedule = config.schedule;
  base.continue_after_failure = config.continue_after_failure;
  base.master_seed = config.master_seed;

  ExperimentResult result;
  if (config.has_mode(Mode::noiseless)) {
    TrajectoryOptions o = base;
    o.psv = config.has_mode(Mode::psv);
    const auto records = run_ensemble(model, o, 1, 1);
    result.series[Mode::noiseless] =
        summarize(Mode::noiseless, records, config.n_steps, config.dt, gv_norm);
  }
  if (config.has_mode(Mode::noisy) || config.has_mode(Mode::psv)) {
    TrajectoryOptions o = base;
    o.noise = config.noise;
    o.psv = config.has_mode(Mode::psv);
    const auto records = run_ensemble(model, o, config.n_trajectories, threads);
    if (config.has_mode(Mode::noisy)) {
      result.series[Mode::noisy] = summarize(Mode::noisy, records, config.n_steps, config.dt, gv_norm);
    }
    if (config.has_mode(Mode::psv)) {
      result.series[Mode::psv] = summarize(Mode::psv, records, config.n_steps, config.dt, gv_norm);
    }
  }
  if (config.has_mode(Mode::dps)) {
    TrajectoryOptions o = base;
    o.noise = config.noise;
    o.dps = true;
    if (!config.paired) o.master_seed = mix64(config.master_seed ^ 0xD1B54A32D192ED03ULL);
    const auto records = run_ensemble(model, o, config.n_trajectories, threads);
    result.series[Mode::dps] = summarize(Mode::dps, records, config.n_steps, config.dt, gv_norm);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string series_to_csv(const ModeSeries& series, const LatticeGeometry& geom,
                          const FiniteGroup& group) {
  std::ostringstream os;
  os << "t_over_a,mode,mean_OP1,std_OP1,stderr_OP1,n_valid,mean_HE,mean_HB";
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (Element g = 1; g < group.order(); ++g) os << ",GV_" << g << '_' << v;
  }
  os << ",psv_num,psv_den,P_s\n";
  const std::size_t n_gv = geom.n_vertices() * (group.order() - 1);
  const std::string mode = to_string(series.mode);
  for (const auto& r : series.rows) {
    os << fmt(r.t) << ',' << mode << ',' << fmt(r.mean_op1) << ',' << fmt(r.std_op1) << ','
       << fmt(r.stderr_op1) << ',' << r.n_valid << ',' << fmt(r.mean_he) << ','
       << fmt(r.mean_hb);
    for (std::size_t i = 0; i < n_gv; ++i) os << ',' << (i < r.gv.size() ? fmt(r.gv[i]) : "");
    os << ',' << fmt(r.psv_num) << ',' << fmt(r.psv_den) << ',' << fmt(r.p_s) << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_experiment(const ExperimentConfig& config, const ExperimentResult& result,
                      std::size_t threads) {
  const FiniteGroup group = config_group(config);
  const LatticeGeometry geom = ladder_geometry(config.n_plaquettes);
  const std::filesystem::path dir(config.output_dir);
  ordered_json files = json::array();
  for (const auto& [mode, series] : result.series) {
    const std::string name = to_string(mode) + ".csv";
    write_file_atomic(dir / name, series_to_csv(series, geom, group));
    files.push_back(name);
  }
  ordered_json manifest;
  manifest["config"] = ordered_json::parse(config_to_json_text(config));
  manifest["git_hash"] = QLGT_GIT_HASH;
  manifest["wall_seconds"] = result.wall_seconds;
  manifest["threads"] = threads;
  manifest["files"] = files;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<CalibrationRow> noise_calibrate(const std::vector<double>& gammas, std::size_t dim,
                                            std::size_t samples, std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("noise_calibrate: need at least 100 samples");
  if (dim < 2) throw std::invalid_argument("noise_calibrate: dim must be >= 2");
  std::vector<CalibrationRow> rows;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const double gamma = gammas[gi];
    if (gamma < 0.0) throw std::invalid_argument("noise_calibrate: gamma must be >= 0");
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      StreamRng rng(stream_key(seed, gi * samples + s));
      const double x = householder_trace(draw_householder(dim, rng), gamma).real() / static_cast<double>(dim);
      sum += x;
      sum_sq += x * x;
    }
    const double n = static_cast<double>(samples);
    CalibrationRow row;
    row.gamma = gamma;
    row.analytic = hs_mean(gamma, dim);
    row.mc_mean = sum / n;
    row.mc_stderr = std::sqrt(std::max(0.0, (sum_sq - sum * row.mc_mean) / (n - 1.0)) / n);
    row.samples = samples;
    rows.push_back(row);
  }
  return rows;
}

std::string calibration_to_csv(const std::vector<CalibrationRow>& rows) {
  std::ostringstream os;
  os << "gamma,analytic,mc_mean,mc_stderr,samples,z_score\n";
  for (const auto& r : rows) {
    const double z = r.mc_stderr > 0.0 ? (r.mc_mean - r.analytic) / r.mc_stderr : 0.0;
    os << fmt(r.gamma) << ',' << fmt(r.analytic) << ',' << fmt(r.mc_mean) << ','
       << fmt(r.mc_stderr) << ',' << r.samples << ',' << fmt(z) << '\n';
  }
  return os.str();
}

std::string compile_report_json_text(std::size_t n_plaquettes, const CouplingParams& coupling,
                                     double dt) {
  const FiniteGroup group = build_d3();
  const LatticeGeometry geom = ladder_geometry(n_plaquettes);
  auto report_json = [](const ResourceReport& r) {
    return ordered_json::parse(resource_report_to_json_text(r));
  };
  ordered_json doc;
  doc["group"] = group.name();
  doc["n_plaquettes"] = n_plaquettes;
  doc["trotter_step"] = report_json(resource_report(compile_trotter_step(geom, group, coupling, dt)));
  ordered_json plaquettes = json::array();
  for (std::size_t p = 0; p < geom.plaquettes.size(); ++p) {
    plaquettes.push_back(report_json(
        resource_report(compile_plaquette_step(geom, group, coupling, dt, p))));
  }
  doc["plaquettes"] = plaquettes;
  ordered_json checks = json::array();
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (Element g = 1; g < group.order(); ++g) {
      const auto c = compile_dps_check(geom, group, v, g);
      ordered_json entry;
      entry["vertex"] = v;
      entry["element"] = g;
      entry["report"] = report_json(resource_report(c.sequence, {c.ancilla_dim}));
      checks.push_back(entry);
    }
  }
  doc["dps_checks"] = checks;
  return doc.dump(2) + "\n";
}

}  // namespace qlgt
