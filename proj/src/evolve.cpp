#include "qlgt/evolve.hpp"

#include <cmath>
#include <stdexcept>

namespace qlgt {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::householder: return "householder";
    case NoiseKind::dephasing: return "dephasing";
  }
  return "none";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "none") return NoiseKind::none;
  if (name == "householder") return NoiseKind::householder;
  if (name == "dephasing") return NoiseKind::dephasing;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

namespace {

CMatrix propagator(const CMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  CVector phases(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases[i] = std::polar(1.0, -eig.eigenvalues()[i] * dt);
  }
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

std::size_t register_dim(const LatticeGeometry& geom, const FiniteGroup& group) {
  std::size_t dim = 1;
  for (std::size_t l = 0; l < geom.n_links(); ++l) dim *= group.order();
  return dim;
}

}  // namespace

SimulationModel::SimulationModel(FiniteGroup group, std::size_t n_plaquettes,
                                 CouplingParams coupling, double dt, std::string irrep_label)
    : group_(std::move(group)),
      geom_(ladder_geometry(n_plaquettes)),
      coupling_(coupling),
      irrep_label_(std::move(irrep_label)),
      dt_(dt),
      dim_(register_dim(geom_, group_)),
      actions_(geom_, group_) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  h_b_ = magnetic_phase_table(geom_, coupling_, group_, irrep_label_);
  h_b_dt_.resize(h_b_.size());
  for (std::size_t i = 0; i < h_b_.size(); ++i) h_b_dt_[i] = h_b_[i] * dt_;
  for (std::size_t p = 0; p < geom_.plaquettes.size(); ++p) {
    plaquettes_.push_back(plaquette_trace_table(geom_, group_, p, irrep_label_));
  }
  h_e_ = electric_link_hamiltonian(coupling_, group_, irrep_label_);
  u_e_ = propagator(h_e_, dt_);
}

QuditState initial_state(const LatticeGeometry& geom, const FiniteGroup& group) {
  QuditState state(geom.n_links(), group.order());
  state.amplitudes().setConstant(Complex(1.0 / std::sqrt(static_cast<double>(state.size())), 0.0));
  return state;
}

void trotter_step(QuditState& state, const SimulationModel& model) {
  apply_diagonal_phase(state, model.magnetic_step_phase());
  for (std::size_t l = 0; l < model.geometry().n_links(); ++l) {
    apply_link_unitary(state, l, model.electric_propagator());
  }
}

double electric_energy(const QuditState& state, const SimulationModel& model) {
  double total = 0.0;
  for (std::size_t l = 0; l < model.geometry().n_links(); ++l) {
    const std::size_t link[1] = {l};
    total += overlap_after_operator(state, link, model.electric()).real();
  }
  return total;
}

HouseholderDraw draw_householder(std::size_t dim, StreamRng& rng) {
  HouseholderDraw draw;
  draw.v.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    draw.v[static_cast<Eigen::Index>(i)] = Complex(re, im);
  }
  draw.v.normalize();
  draw.d.resize(dim);
  for (auto& x : draw.d) x = rng.normal();
  return draw;
}

void apply_householder(QuditState& state, const HouseholderDraw& draw, double gamma) {
  CVector& psi = state.amplitudes();
  const Complex proj = draw.v.dot(psi);  // v^dag psi
  psi -= (2.0 * proj) * draw.v;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    psi[i] *= std::polar(1.0, gamma * draw.d[static_cast<std::size_t>(i)]);
  }
}

CMatrix householder_unitary(const HouseholderDraw& draw, double gamma) {
  const auto dim = static_cast<std::size_t>(draw.v.size());
  require_dense_allowed(dim, "householder_unitary");
  CMatrix u = CMatrix::Identity(draw.v.size(), draw.v.size()) - 2.0 * draw.v * draw.v.adjoint();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    u.row(i) *= std::polar(1.0, gamma * draw.d[static_cast<std::size_t>(i)]);
  }
  return u;
}

CMatrix sample_householder_unitary(std::size_t dim, double gamma, StreamRng& rng) {
  require_dense_allowed(dim, "sample_householder_unitary");
  return householder_unitary(draw_householder(dim, rng), gamma);
}

Complex householder_trace(const HouseholderDraw& draw, double gamma) {
  Complex tr = 0.0;
  for (Eigen::Index i = 0; i < draw.v.size(); ++i) {
    tr += std::polar(1.0, gamma * draw.d[static_cast<std::size_t>(i)]) * (1.0 - 2.0 * std::norm(draw.v[i]));
  }
  return tr;
}

void apply_dephasing(QuditState& state, double gamma, StreamRng& rng) {
  CVector& psi = state.amplitudes();
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -gamma * rng.normal());
}

double hs_mean(double gamma, std::size_t dim) {
  return (1.0 - 2.0 / static_cast<double>(dim)) * std::exp(-0.5 * gamma * gamma);
}

double f_gamma(double gamma, std::size_t dim) { return 1.0 - hs_mean(gamma, dim); }

void check_noise_allowed(const NoiseSpec& noise, std::size_t dim) {
  if (noise.gamma < 0.0) throw std::invalid_argument("noise gamma must be non-negative");
  if (noise.kind == NoiseKind::householder && dim > kDenseDimLimit) {
    throw std::length_error("householder noise needs a dense " + std::to_string(dim) + "x" +
                            std::to_string(dim) + " unitary; use dephasing at this size");
  }
}

namespace {

StepRecord observe(const QuditState& state, const SimulationModel& model, std::size_t step,
                   bool psv) {
  StepRecord rec;
  rec.step = step;
  rec.t = static_cast<double>(step) * model.dt();
  rec.op1 = expectation_diagonal(state, model.plaquette(0));
  rec.h_b = expectation_diagonal(state, model.magnetic());
  rec.h_e = electric_energy(state, model);
  const auto& actions = model.actions();
  const std::size_t order = model.group().order();
  rec.gauss.reserve(actions.n_vertices() * (order - 1));
  for (std::size_t v = 0; v < actions.n_vertices(); ++v) {
    for (Element g = 1; g < order; ++g) {
      rec.gauss.push_back(overlap_after_permutation(state, actions.at(v, g)));
    }
  }
  if (psv) {
    const QuditState projected = actions.project(state);
    const Complex* a = state.amplitudes().data();
    const Complex* b = projected.amplitudes().data();
    const auto& o = model.plaquette(0);
    const auto& hb = model.magnetic();
    double den = 0.0, num_op = 0.0, num_hb = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double w = (std::conj(a[i]) * b[i]).real();
      den += w;
      num_op += o[i] * w;
      num_hb += hb[i] * w;
    }
    rec.psv_den = den;
    rec.psv_num_op1 = num_op;
    rec.psv_num_hb = num_hb;
  }
  return rec;
}

}  // namespace

TrajectoryRecord run_trajectory(const SimulationModel& model, const TrajectoryOptions& options,
                                std::size_t traj_index) {
  check_noise_allowed(options.noise, model.dim());
  const auto& geom = model.geometry();
  const auto& group = model.group();
  const MeasurementSchedule schedule =
      options.schedule.entries.empty() ? default_schedule(geom, group) : options.schedule;
  if (options.dps) validate_schedule(schedule, geom, group);

  TrajectoryRecord record;
  record.index = traj_index;
  record.seed = stream_key(options.master_seed, traj_index);
  StreamRng rng(record.seed);

  QuditState state = initial_state(geom, group);
  record.steps.push_back(observe(state, model, 0, options.psv));

  bool survived = true;
  for (std::size_t step = 1; step <= options.n_steps; ++step) {
    trotter_step(state, model);
    if (options.noise.active()) {
      if (options.noise.kind == NoiseKind::householder) {
        apply_householder(state, draw_householder(model.dim(), rng), options.noise.gamma);
      } else {
        apply_dephasing(state, options.noise.gamma, rng);
      }
    }
    const double u = rng.uniform();
    if (options.dps && survived) {
      const ScheduleEntry& e = schedule.for_step(step);
      const DpsOutcome out = dps_measure(state, model.actions(), group, e.vertex, e.element, u);
      survived = out.satisfied;
      record.dps_log.push_back({step, e.vertex, e.element, out.outcome, survived});
    }
    StepRecord rec = observe(state, model, step, options.psv);
    rec.survived = survived;
    record.steps.push_back(std::move(rec));
    if (!survived && !options.continue_after_failure) break;
  }
  return record;
}

}  // namespace qlgt
