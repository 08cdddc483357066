#include <algorithm>
#include <cstdlib>

#include <doctest.h>

#include "oracles.hpp"
#include "qlgt/evolve.hpp"

using namespace qlgt;

namespace {

const SimulationModel& model_n2() {
  static const SimulationModel m(build_d3(), 2, {0.5}, 0.25);
  return m;
}

oracle::Mat dense_step(double inv_g2, double dt) {
  const oracle::Mat he = oracle::electric(inv_g2);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> eig(he);
  oracle::Vec ph(6);
  for (int i = 0; i < 6; ++i) ph[i] = std::polar(1.0, -eig.eigenvalues()[i] * dt);
  const oracle::Mat ue = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
  const oracle::Mat ue_all = oracle::kron_links({ue, ue, ue, ue});
  const auto hb = oracle::hb_n2(inv_g2);
  oracle::Vec d(1296);
  for (int i = 0; i < 1296; ++i) d[i] = std::polar(1.0, -hb[static_cast<std::size_t>(i)] * dt);
  return ue_all * d.asDiagonal();
}

oracle::Vec uniform_state() { return oracle::Vec::Constant(1296, 1.0 / 36.0); }

}  // namespace

TEST_CASE("initial state is the normalized uniform superposition") {
  const QuditState s = initial_state(model_n2().geometry(), model_n2().group());
  CHECK(s.size() == 1296);
  CHECK((s.amplitudes() - uniform_state()).norm() < 1e-15);
  CHECK(std::abs(symmetric_weight(s, model_n2().actions()) - 1.0) < 1e-12);
}

TEST_CASE("one Trotter step equals the dense product formula") {
  QuditState s(4, 6, oracle::random_state(1296, 31));
  const oracle::Vec ref = dense_step(0.5, 0.25) * s.amplitudes();
  trotter_step(s, model_n2());
  CHECK((s.amplitudes() - ref).norm() < 1e-12);
}

TEST_CASE("Trotter error is first order in dt against exact evolution") {
  const oracle::Mat h = oracle::dense_hamiltonian_n2(0.5);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> eig(h);
  const double t = 1.0;
  oracle::Vec ph(1296);
  for (int i = 0; i < 1296; ++i) ph[i] = std::polar(1.0, -eig.eigenvalues()[i] * t);
  const oracle::Vec psi0 = uniform_state();
  const oracle::Vec exact = eig.eigenvectors() * (ph.asDiagonal() * (eig.eigenvectors().adjoint() * psi0));

  // Energy is constant under exact evolution.
  const double e0 = psi0.dot(h * psi0).real();
  CHECK(std::abs(exact.dot(h * exact).real() - e0) < 1e-10);

  std::vector<double> err;
  for (double dt : {0.1, 0.05, 0.025}) {
    const SimulationModel m(build_d3(), 2, {0.5}, dt);
    QuditState s = initial_state(m.geometry(), m.group());
    const auto steps = static_cast<int>(std::lround(t / dt));
    for (int i = 0; i < steps; ++i) trotter_step(s, m);
    err.push_back((s.amplitudes() - exact).norm());
  }
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("electric energy agrees with the dense link sum") {
  const QuditState s(4, 6, oracle::random_state(1296, 32));
  const oracle::Mat he = oracle::electric(0.5);
  double ref = 0.0;
  for (std::size_t l = 0; l < 4; ++l) {
    std::vector<oracle::Mat> ops(4, oracle::id6());
    ops[l] = he;
    ref += s.amplitudes().dot(oracle::kron_links(ops) * s.amplitudes()).real();
  }
  CHECK(std::abs(electric_energy(s, model_n2()) - ref) < 1e-11);
}

TEST_CASE("Householder noise: in-place application matches the dense unitary") {
  StreamRng rng(7, 0);
  const HouseholderDraw draw = draw_householder(216, rng);
  CHECK(std::abs(draw.v.norm() - 1.0) < 1e-12);
  const CMatrix u = householder_unitary(draw, 0.3);
  CHECK((u.adjoint() * u - CMatrix::Identity(216, 216)).norm() < 1e-10);
  QuditState s(3, 6, oracle::random_state(216, 33));
  const CVector ref = u * s.amplitudes();
  apply_householder(s, draw, 0.3);
  CHECK((s.amplitudes() - ref).norm() < 1e-12);

  CHECK(std::abs(householder_trace(draw, 0.3) - u.trace()) < 1e-10);

  // Reflection part alone: 1 - 2 v v^dag has trace dim - 2.
  CHECK(std::abs(householder_unitary(draw, 0.0).trace() - Complex(214.0, 0.0)) < 1e-10);
}

TEST_CASE("Householder noise: draws are reproducible per stream") {
  StreamRng a(11, 5), b(11, 5), c(11, 6);
  const auto da = draw_householder(36, a), db = draw_householder(36, b), dc = draw_householder(36, c);
  CHECK(da.v == db.v);
  CHECK(da.d == db.d);
  CHECK(da.v != dc.v);
}

TEST_CASE("Householder noise: Monte-Carlo trace mean matches the analytic value") {
  const std::size_t dim = 36, samples = 4000;
  for (double gamma : {0.1, 0.3, 0.6}) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      StreamRng rng(99, k);
      const double x = sample_householder_unitary(dim, gamma, rng).trace().real() / static_cast<double>(dim);
      sum += x;
      sum_sq += x * x;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - hs_mean(gamma, dim)) < 4.0 * se + 1e-12);
  }
  CHECK(f_gamma(0.2, 1296) == doctest::Approx(1.0 - hs_mean(0.2, 1296)));
  CHECK(hs_mean(0.0, 1296) == doctest::Approx(1.0 - 2.0 / 1296.0));
}

TEST_CASE("dephasing preserves the norm and the size guard rejects dense noise") {
  QuditState s(4, 6, oracle::random_state(1296, 34));
  StreamRng rng(3, 0);
  apply_dephasing(s, 0.5, rng);
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  CHECK_NOTHROW(check_noise_allowed({NoiseKind::householder, 0.2}, 1296));
  CHECK_THROWS_AS(check_noise_allowed({NoiseKind::householder, 0.2}, 46656), std::length_error);
  CHECK_NOTHROW(check_noise_allowed({NoiseKind::dephasing, 0.2}, 46656));
  CHECK(parse_noise_kind("householder") == NoiseKind::householder);
  CHECK(to_string(NoiseKind::dephasing) == "dephasing");
  CHECK_THROWS_AS(parse_noise_kind("amplitude"), std::invalid_argument);
  CHECK_FALSE(NoiseSpec{NoiseKind::householder, 0.0}.active());
}

TEST_CASE("noiseless trajectory stays gauge invariant and follows the dense evolution") {
  TrajectoryOptions opt;
  opt.n_steps = 8;
  opt.psv = true;
  const TrajectoryRecord r = run_trajectory(model_n2(), opt, 0);
  REQUIRE(r.steps.size() == 9);
  const oracle::Mat u = dense_step(0.5, 0.25);
  const auto op = oracle::op1_n2();
  oracle::Vec psi = uniform_state();
  for (std::size_t k = 0; k <= 8; ++k) {
    double ref = 0.0;
    for (int i = 0; i < 1296; ++i) ref += std::norm(psi[i]) * op[static_cast<std::size_t>(i)];
    CHECK(std::abs(r.steps[k].op1 - ref) < 1e-12);
    CHECK(std::abs(r.steps[k].psv_den - 1.0) < 1e-12);
    CHECK(std::abs(r.steps[k].psv_num_op1 - r.steps[k].op1) < 1e-12);
    for (const Complex& g : r.steps[k].gauss) CHECK(std::abs(g - 1.0) < 1e-12);
    psi = u * psi;
  }
}

TEST_CASE("trajectories are deterministic and noise is paired across modes") {
  TrajectoryOptions noisy;
  noisy.n_steps = 12;
  noisy.noise = {NoiseKind::householder, 0.2};
  noisy.master_seed = 42;
  const auto a = run_trajectory(model_n2(), noisy, 3);
  const auto b = run_trajectory(model_n2(), noisy, 3);
  for (std::size_t k = 0; k < a.steps.size(); ++k) CHECK(a.steps[k].op1 == b.steps[k].op1);
  const auto other = run_trajectory(model_n2(), noisy, 4);
  CHECK(other.steps.back().op1 != a.steps.back().op1);

  // PSV bookkeeping consumes no randomness.
  TrajectoryOptions with_psv = noisy;
  with_psv.psv = true;
  const auto c = run_trajectory(model_n2(), with_psv, 3);
  for (std::size_t k = 0; k < a.steps.size(); ++k) CHECK(c.steps[k].op1 == a.steps[k].op1);
  CHECK(c.steps.back().psv_den < 1.0);

  // The DPS run sees the same noise: until its first projection changes the
  // state, observables coincide with the unmitigated run.
  TrajectoryOptions dps = noisy;
  dps.dps = true;
  dps.continue_after_failure = true;
  const auto d = run_trajectory(model_n2(), dps, 3);
  CHECK(d.steps.size() == 13);
  CHECK(d.steps[0].op1 == a.steps[0].op1);
  // Checks run until the first failure; later steps keep evolving unchecked.
  std::size_t checked = 0;
  while (checked < 12 && d.steps[checked + 1].survived) ++checked;
  CHECK(d.dps_log.size() == std::min<std::size_t>(checked + 1, 12));
}

TEST_CASE("DPS without noise always survives; failures stop the trajectory") {
  TrajectoryOptions clean;
  clean.n_steps = 10;
  clean.dps = true;
  const auto r = run_trajectory(model_n2(), clean, 0);
  CHECK(r.steps.size() == 11);
  for (const auto& s : r.steps) CHECK(s.survived);
  for (const auto& e : r.dps_log) CHECK(e.outcome == 0);

  TrajectoryOptions noisy = clean;
  noisy.n_steps = 200;
  noisy.noise = {NoiseKind::householder, 0.5};
  bool saw_failure = false;
  for (std::size_t i = 0; i < 20 && !saw_failure; ++i) {
    const auto t = run_trajectory(model_n2(), noisy, i);
    if (!t.steps.back().survived) {
      saw_failure = true;
      CHECK(t.steps.back().step == t.dps_log.back().step);
      CHECK_FALSE(t.dps_log.back().survived);
      CHECK(t.steps.size() <= 201);
      for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) CHECK(t.steps[k].survived);
    }
  }
  CHECK(saw_failure);
}
