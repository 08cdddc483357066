#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qlgt/mitigate.hpp"
#include "qlgt/model.hpp"
#include "qlgt/records.hpp"
#include "qlgt/rng.hpp"

namespace qlgt {

struct TrotterParams {
  double dt = 0.25;  // dt/a
  std::size_t n_steps = 100;
  CouplingParams coupling;
};

enum class NoiseKind { none, householder, dephasing };

std::string to_string(NoiseKind kind);
/// Throws std::invalid_argument for unknown names.
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double gamma = 0.0;

  /// gamma = 0 is noiseless for every kind, so no draws are consumed.
  bool active() const { return kind != NoiseKind::none && gamma > 0.0; }
};

/// Precomputed tables shared by every trajectory of one lattice and coupling.
class SimulationModel {
 public:
  SimulationModel(FiniteGroup group, std::size_t n_plaquettes, CouplingParams coupling,
                  double dt, std::string irrep_label = "tau");

  const FiniteGroup& group() const { return group_; }
  const LatticeGeometry& geometry() const { return geom_; }
  const CouplingParams& coupling() const { return coupling_; }
  const std::string& irrep_label() const { return irrep_label_; }
  double dt() const { return dt_; }
  std::size_t dim() const { return dim_; }

  /// Diagonal of H_B.
  const std::vector<double>& magnetic() const { return h_b_; }
  /// Diagonal of H_B dt.
  const std::vector<double>& magnetic_step_phase() const { return h_b_dt_; }
  /// Re Tr of plaquette p, per basis index.
  const std::vector<double>& plaquette(std::size_t p) const { return plaquettes_.at(p); }
  /// Single-link H_E and exp(-i H_E dt).
  const CMatrix& electric() const { return h_e_; }
  const CMatrix& electric_propagator() const { return u_e_; }
  const GaugeActions& actions() const { return actions_; }

 private:
  FiniteGroup group_;
  LatticeGeometry geom_;
  CouplingParams coupling_;
  std::string irrep_label_;
  double dt_;
  std::size_t dim_;
  std::vector<double> h_b_;
  std::vector<double> h_b_dt_;
  std::vector<std::vector<double>> plaquettes_;
  CMatrix h_e_;
  CMatrix u_e_;
  GaugeActions actions_;
};

/// Uniform superposition over the group-element basis, |G|^{-L/2} per amplitude.
QuditState initial_state(const LatticeGeometry& geom, const FiniteGroup& group);

/// exp(-i H_B dt) as a diagonal phase, then exp(-i H_E dt) on every link.
void trotter_step(QuditState& state, const SimulationModel& model);

/// <H_E> summed over links.
double electric_energy(const QuditState& state, const SimulationModel& model);

/// One Householder noise realization: unit vector v and diagonal D.
struct HouseholderDraw {
  CVector v;
  std::vector<double> d;
};

/// Draw order: (Re v_i, Im v_i) for i = 0..dim-1, then d_0..d_{dim-1}.
HouseholderDraw draw_householder(std::size_t dim, StreamRng& rng);
/// psi <- exp(i gamma D)(1 - 2 v v^dag) psi, without forming the dense matrix.
void apply_householder(QuditState& state, const HouseholderDraw& draw, double gamma);
/// Dense exp(i gamma D)(1 - 2 v v^dag); guarded by kDenseDimLimit.
CMatrix householder_unitary(const HouseholderDraw& draw, double gamma);
CMatrix sample_householder_unitary(std::size_t dim, double gamma, StreamRng& rng);
/// Tr[exp(i gamma D)(1 - 2 v v^dag)] in O(dim), equal to the trace of householder_unitary.
Complex householder_trace(const HouseholderDraw& draw, double gamma);

/// psi_i <- exp(-i gamma h_i) psi_i with fresh standard-normal h_i.
void apply_dephasing(QuditState& state, double gamma, StreamRng& rng);

/// Analytic mean of Re Tr(U)/dim for Householder noise: (1 - 2/dim) exp(-gamma^2/2).
double hs_mean(double gamma, std::size_t dim);
/// Error probability per step, 1 - hs_mean.
double f_gamma(double gamma, std::size_t dim);

/// Throws std::length_error if the noise needs a dense operator the size guard forbids.
void check_noise_allowed(const NoiseSpec& noise, std::size_t dim);

struct TrajectoryOptions {
  std::size_t n_steps = 100;
  NoiseSpec noise;
  bool dps = false;
  bool psv = false;
  MeasurementSchedule schedule;  // empty: default_schedule
  bool continue_after_failure = false;
  std::uint64_t master_seed = 0;
};

/// Runs one trajectory. Per step: Trotter factors, noise, then one uniform that is
/// always drawn and consumed by the DPS check when enabled. Noise realizations are
/// therefore identical across modes for the same (master_seed, index).
TrajectoryRecord run_trajectory(const SimulationModel& model, const TrajectoryOptions& options,
                                std::size_t traj_index);

}  // namespace qlgt
