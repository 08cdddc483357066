// Acceptance run: one PASS/FAIL line per criterion on stdout, diagnostics on stderr.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qlgt/analysis.hpp"
#include "qlgt/compile.hpp"
#include "qlgt/evolve.hpp"
#include "qlgt/experiment.hpp"
#include "qlgt/mitigate.hpp"

using namespace qlgt;

namespace {

constexpr double kDt = 0.25;
constexpr double kInvG2 = 0.5;
constexpr std::uint64_t kSeed = 20240611;
// Survivor count below which a DPS mean is treated as statistically unresolved.
constexpr std::size_t kMinSurvivors = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void log(const std::string& s) { std::fprintf(stderr, "  %s\n", s.c_str()); }

std::size_t threads() {
  static const std::size_t n = resolve_threads(std::nullopt);
  return n;
}

// ---------------------------------------------------------------------------
// Ensembles shared between criteria
// ---------------------------------------------------------------------------

struct Ensemble {
  std::size_t n_steps = 0;
  double gamma = 0.0;
  std::vector<TrajectoryRecord> noisy;  // PSV bookkeeping on
  std::vector<TrajectoryRecord> dps;    // same streams, with checks
};

Ensemble run_pair(const SimulationModel& model, NoiseKind kind, double gamma, std::size_t steps,
                  std::size_t m) {
  const auto t0 = std::chrono::steady_clock::now();
  Ensemble e;
  e.n_steps = steps;
  e.gamma = gamma;
  TrajectoryOptions o;
  o.n_steps = steps;
  o.noise = {kind, gamma};
  o.master_seed = kSeed;
  o.psv = true;
  e.noisy = run_ensemble(model, o, m, threads());
  o.psv = false;
  o.dps = true;
  e.dps = run_ensemble(model, o, m, threads());
  log(fmt("ensemble n=%zu %s gamma=%.3f steps=%zu M=%zu: %.1f s", model.geometry().n_plaquettes,
          to_string(kind).c_str(), gamma, steps, m, seconds_since(t0)));
  return e;
}

std::vector<TrajectoryRecord> head(const std::vector<TrajectoryRecord>& r, std::size_t m) {
  return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(std::min(m, r.size()))};
}

ModeSeries noiseless_series(const SimulationModel& model, std::size_t steps) {
  TrajectoryOptions o;
  o.n_steps = steps;
  const auto rec = run_trajectory(model, o, 0);
  return summarize(Mode::noiseless, {rec}, steps, model.dt(),
                   gv_normalizations(model.geometry(), model.group()));
}

std::vector<double> psv_weight(const std::vector<TrajectoryRecord>& recs, std::size_t steps) {
  std::vector<double> w(steps + 1, 0.0);
  for (const auto& r : recs) {
    for (const auto& s : r.steps) w[s.step] += s.psv_den;
  }
  for (auto& x : w) x /= static_cast<double>(recs.size());
  return w;
}

std::vector<double> time_grid(std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = kDt * static_cast<double>(k);
  return t;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double u = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - u) * y[i - 1] + u * y[i];
}

// Largest pairwise deviation of curves (x_i, y_i) on the common x window.
double collapse_deviation(const std::vector<std::vector<double>>& xs,
                          const std::vector<std::vector<double>>& ys) {
  double hi = xs.front().back();
  for (const auto& x : xs) hi = std::min(hi, x.back());
  double worst = 0.0;
  constexpr int kGrid = 200;
  for (int g = 0; g <= kGrid; ++g) {
    const double at = hi * g / kGrid;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (std::size_t b = a + 1; b < xs.size(); ++b) {
        worst = std::max(worst, std::abs(interpolate(xs[a], ys[a], at) - interpolate(xs[b], ys[b], at)));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const FiniteGroup g = build_d3();
  const auto d2 = physical_dimension(ladder_geometry(2), g);
  const auto d3 = physical_dimension(ladder_geometry(3), g);
  const double sec = seconds_since(t0);
  Outcome o;
  o.pass = d2.character_formula == 49 && d2.fixed_point_trace == 49 && d3.character_formula == 251 &&
           d3.fixed_point_trace == 251 && sec < 1.0;
  o.detail = fmt("n=2: %zu/%zu, n=3: %zu/%zu (character/fixed-point), %.3f s", d2.character_formula,
                 d2.fixed_point_trace, d3.character_formula, d3.fixed_point_trace, sec);
  return o;
}

Outcome criterion2(const SimulationModel& model) {
  const auto t0 = std::chrono::steady_clock::now();
  TrajectoryOptions opt;
  opt.n_steps = 100;
  opt.psv = true;
  const auto rec = run_trajectory(model, opt, 0);
  const auto norms = gv_normalizations(model.geometry(), model.group());
  double max_gv = 0.0, max_w = 0.0;
  for (const auto& s : rec.steps) {
    for (std::size_t i = 0; i < s.gauss.size(); ++i) max_gv = std::max(max_gv, gauge_violation(s.gauss[i], norms[i]));
    max_w = std::max(max_w, std::abs(s.psv_den - 1.0));
  }
  const double sec = seconds_since(t0);
  Outcome o;
  o.pass = max_gv < 1e-9 && max_w < 1e-9 && sec < 5.0;
  o.detail = fmt("max GV %.2e, max |weight-1| %.2e over 100 steps, %.2f s", max_gv, max_w, sec);
  return o;
}

Outcome criterion3(const SimulationModel& model) {
  const QuditState psi = initial_state(model.geometry(), model.group());
  const double v = plaquette_expectation(psi, model.geometry(), model.group(), 0);
  return {std::abs(v) <= 1e-12, fmt("<O_P1>(0) = %.3e", v)};
}

Outcome criterion4() {
  const FiniteGroup g = build_d3();
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  // Eigenvalue multiplicities in the order {1, -1, w, w*}.
  auto classify = [&](const IndexMap& map) {
    Eigen::ComplexEigenSolver<CMatrix> eig(permutation_matrix(map));
    std::vector<int> c(5, 0);
    const Complex ref[4] = {1.0, -1.0, w, std::conj(w)};
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      int hit = 4;
      for (int k = 0; k < 4; ++k) {
        if (std::abs(eig.eigenvalues()[i] - ref[k]) < 1e-9) hit = k;
      }
      ++c[static_cast<std::size_t>(hit)];
    }
    return c;
  };
  const std::vector<int> refl{3, 3, 0, 0, 0}, rot{2, 0, 2, 2, 0};
  const std::vector<int> refl_lr{4, 2, 0, 0, 0}, rot_lr{4, 0, 1, 1, 0};
  bool ok = true;
  int cases = 0;
  for (Element x = 1; x < 6; ++x) {
    const bool reflection = g.element_order(x) == 2;
    for (EndTag tag : {EndTag::L, EndTag::R, EndTag::LR}) {
      const auto c = classify(link_factor_map(g, tag, x));
      const auto& want = tag == EndTag::LR ? (reflection ? refl_lr : rot_lr) : (reflection ? refl : rot);
      ok = ok && c == want;
      ++cases;
    }
  }
  return {ok, fmt("%d single-link factors (L, R, LR for every g != e) match the expected multisets", cases)};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = noise_calibrate({0.1, 0.2, 0.3}, 1296, 2000, kSeed);
  const double sec = seconds_since(t0);
  bool ok = sec < 120.0;
  std::string d;
  for (const auto& r : rows) {
    const double z = std::abs(r.mc_mean - r.analytic) / r.mc_stderr;
    ok = ok && z <= 3.0;
    d += fmt("g=%.1f: %.6f vs %.6f (%.2f se); ", r.gamma, r.mc_mean, r.analytic, z);
  }
  return {ok, d + fmt("%.1f s", sec)};
}

Outcome criterion6(const std::vector<const Ensemble*>& runs) {
  bool ok = true;
  std::string d;
  std::vector<std::vector<double>> xs_dps, ys_dps, xs_psv, ys_psv;
  for (const Ensemble* e : runs) {
    const double f = f_gamma(e->gamma, 1296);
    const double expect = f / kDt;
    const auto t = time_grid(e->n_steps);
    const auto ps = survival_series(e->dps, e->n_steps);
    const auto w = psv_weight(e->noisy, e->n_steps);
    const auto fit_dps = fit_exponential_rate(t, ps);
    // The weight leaves the common exponential near (t/a) f = 0.3; fit the early part.
    std::vector<double> te, we;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] * f <= 0.3) {
        te.push_back(t[k]);
        we.push_back(w[k]);
      }
    }
    const auto fit_psv = fit_exponential_rate(te, we);
    const double r_dps = fit_dps ? fit_dps->rate : std::nan("");
    const double r_psv = fit_psv ? fit_psv->rate : std::nan("");
    const bool ok_dps = fit_dps && std::abs(r_dps / expect - 1.0) <= 0.15;
    const bool ok_psv = fit_psv && std::abs(r_psv / expect - 1.0) <= 0.15;
    ok = ok && ok_dps && ok_psv;
    d += fmt("g=%.1f f/dt=%.4f DPS %.4f (x%.2f) PSV %.4f (x%.2f); ", e->gamma, expect, r_dps,
             r_dps / expect, r_psv, r_psv / expect);
    xs_dps.push_back(collapse_time(t, e->gamma, 1296));
    ys_dps.push_back(ps);
    xs_psv.push_back(collapse_time(t, e->gamma, 1296));
    ys_psv.push_back(w);
  }
  const double dev_dps = collapse_deviation(xs_dps, ys_dps);
  const double dev_psv = collapse_deviation(xs_psv, ys_psv);
  ok = ok && dev_dps < 0.05 && dev_psv < 0.05;
  d += fmt("collapse max deviation DPS %.3f PSV %.3f", dev_dps, dev_psv);
  return {ok, d};
}

Outcome criterion7(const SimulationModel& model, const Ensemble& e) {
  const auto norms = gv_normalizations(model.geometry(), model.group());
  const ModeSeries noisy = summarize(Mode::noisy, e.noisy, e.n_steps, kDt, norms);
  const auto w = psv_weight(e.noisy, e.n_steps);
  // Late window t/a in [35, 40].
  double weight = 0.0, refl = 0.0, rot = 0.0, worst_refl = 0.0, worst_rot = 0.0;
  std::size_t count = 0;
  const std::size_t per_vertex = model.group().order() - 1;
  std::vector<double> gv_mean(norms.size(), 0.0);
  for (std::size_t k = 0; k <= e.n_steps; ++k) {
    const double t = kDt * static_cast<double>(k);
    if (t < 35.0 || t > 40.0) continue;
    weight += w[k];
    for (std::size_t i = 0; i < norms.size(); ++i) gv_mean[i] += noisy.rows[k].gv[i];
    ++count;
  }
  weight /= static_cast<double>(count);
  std::size_t n_refl = 0, n_rot = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    gv_mean[i] /= static_cast<double>(count);
    const Element g = 1 + i % per_vertex;
    if (model.group().element_order(g) == 2) {
      refl += gv_mean[i];
      worst_refl = std::max(worst_refl, std::abs(gv_mean[i] - 0.5));
      ++n_refl;
    } else {
      rot += gv_mean[i];
      worst_rot = std::max(worst_rot, std::abs(gv_mean[i] - 1.0 / std::sqrt(3.0)));
      ++n_rot;
    }
  }
  const double target = 49.0 / 1296.0;
  const double rel = std::abs(weight / target - 1.0);
  Outcome o;
  o.pass = e.n_steps * kDt >= 40.0 && rel <= 0.2 && worst_refl <= 0.05 && worst_rot <= 0.05;
  o.detail = fmt("t/a in [35,40], M=%zu: weight %.4f vs %.4f (%.1f%%), reflection GV %.3f (max dev %.3f), "
                 "rotation GV %.3f (max dev %.3f)",
                 e.noisy.size(), weight, target, 100.0 * rel, refl / static_cast<double>(n_refl), worst_refl,
                 rot / static_cast<double>(n_rot), worst_rot);
  return o;
}

struct Tracks {
  ModeSeries ideal, noisy, dps, psv;
};

Tracks tracks(const SimulationModel& model, const Ensemble& e, std::size_t m) {
  const auto norms = gv_normalizations(model.geometry(), model.group());
  const auto noisy = head(e.noisy, m);
  const auto dps = head(e.dps, m);
  return {noiseless_series(model, e.n_steps), summarize(Mode::noisy, noisy, e.n_steps, kDt, norms),
          summarize(Mode::dps, dps, e.n_steps, kDt, norms), summarize(Mode::psv, noisy, e.n_steps, kDt, norms)};
}

// Largest |mean - ideal| for t/a <= t_max; DPS rows need survivors.
double max_dev(const ModeSeries& s, const ModeSeries& ideal, double t_lo, double t_hi) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    const auto& r = s.rows[k];
    if (r.t < t_lo || r.t > t_hi) continue;
    if (std::isnan(r.mean_op1)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(r.mean_op1 - ideal.rows[k].mean_op1));
  }
  return worst;
}

Outcome criterion8(const SimulationModel& model, const Ensemble& g02, const Ensemble& g03) {
  const std::size_t m = 500;
  const Tracks a = tracks(model, g02, m);
  const double dps_early = max_dev(a.dps, a.ideal, 0.0, 5.0);
  const double psv_early = max_dev(a.psv, a.ideal, 0.0, 5.0);
  const double noisy_mid = max_dev(a.noisy, a.ideal, 5.0, 10.0);

  const Tracks b = tracks(model, g03, m);
  std::optional<double> t_psv, t_dps;
  double dps_horizon = 0.0;
  for (std::size_t k = 0; k < b.psv.rows.size(); ++k) {
    const double ideal = b.ideal.rows[k].mean_op1;
    const auto& p = b.psv.rows[k];
    if (!t_psv && !std::isnan(p.mean_op1) && std::abs(p.mean_op1 - ideal) > 0.1) t_psv = p.t;
    const auto& q = b.dps.rows[k];
    if (q.n_valid >= kMinSurvivors) {
      dps_horizon = q.t;
      if (!t_dps && std::abs(q.mean_op1 - ideal) > 0.1) t_dps = q.t;
    }
  }
  const double dps_time = t_dps.value_or(dps_horizon + kDt);
  Outcome o;
  o.pass = dps_early <= 0.1 && psv_early <= 0.1 && noisy_mid > 0.2 && t_psv && *t_psv < dps_time;
  o.detail = fmt("M=%zu; g=0.2: max dev t/a<=5 DPS %.3f PSV %.3f, noisy max dev in [5,10] %.3f; "
                 "g=0.3: PSV deviates at t/a=%.2f, DPS at %s (survivors >= %zu until t/a=%.2f)",
                 m, dps_early, psv_early, noisy_mid, t_psv.value_or(-1.0),
                 t_dps ? fmt("t/a=%.2f", *t_dps).c_str() : "never", kMinSurvivors, dps_horizon);
  return o;
}

Outcome criterion9(const SimulationModel& model, const Ensemble& e) {
  const Tracks s = tracks(model, e, e.noisy.size());
  std::size_t last = 0;
  for (std::size_t k = 0; k < s.dps.rows.size(); ++k) {
    if (s.dps.rows[k].n_valid >= kMinSurvivors) last = k;
  }
  auto hb = [&](const ModeSeries& m) {
    std::vector<double> v;
    for (std::size_t k = 0; k <= last; ++k) v.push_back(m.rows[k].mean_hb);
    return v;
  };
  const auto ideal = hb(s.ideal), noisy = hb(s.noisy);
  const auto e_dps = protection_efficacy(hb(s.dps), noisy, ideal);
  const auto e_psv = protection_efficacy(hb(s.psv), noisy, ideal);
  // Earliest times: the first four steps where the efficacy is defined.
  bool early = true;
  std::string early_text;
  std::size_t seen = 0;
  for (std::size_t k = 0; k <= last && seen < 4; ++k) {
    if (!e_dps[k] || !e_psv[k]) continue;
    early = early && *e_psv[k] > *e_dps[k];
    early_text += fmt("%s%.3f/%.3f", seen ? "," : "", *e_psv[k], *e_dps[k]);
    ++seen;
  }
  early = early && seen == 4;
  const bool late = e_dps[last] && e_psv[last] && *e_dps[last] >= *e_psv[last];
  Outcome o;
  o.pass = early && late;
  o.detail = fmt("g=0.3, M=%zu, <H_B> cumulative error; early PSV/DPS %s; at t/a=%.2f (last time with >= %zu "
                 "survivors) PSV %.3f DPS %.3f",
                 e.noisy.size(), early_text.c_str(), s.dps.rows[last].t, kMinSurvivors,
                 e_psv[last].value_or(std::nan("")), e_dps[last].value_or(std::nan("")));
  return o;
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = run_verify();
  const double sec = seconds_since(t0);
  bool ok = sec < 10.0;
  std::string d;
  for (const auto& c : checks) {
    if (c.name.rfind("compile_", 0) != 0 && c.name != "control_permutation_counts") continue;
    ok = ok && c.pass;
    d += c.name + " [" + c.detail + "]; ";
  }
  return {ok, d + fmt("%.2f s", sec)};
}

Outcome criterion11() {
  const auto t0 = std::chrono::steady_clock::now();
  const FiniteGroup g = build_d3();
  const LatticeGeometry geom = ladder_geometry(2);
  const CliqueCover cover = commutation_cliques(geom, g);
  const double sec = seconds_since(t0);
  const std::vector<std::vector<Element>> expect{{0, 1, 2}, {3}, {4}, {5}};
  bool classes = cover.vertex_classes.size() == 2;
  for (const auto& c : cover.vertex_classes) classes = classes && c == expect;
  std::size_t nodes = 0;
  bool commuting = true;
  for (const auto& q : cover.cliques) {
    nodes += q.size();
    for (const auto& a : q) {
      for (const auto& b : q) commuting = commuting && gauge_products_commute(geom, g, a, b);
    }
  }
  Outcome o;
  o.pass = classes && commuting && nodes == 36 && cover.cliques.size() <= 16 && sec < 1.0;
  o.detail = fmt("%zu cliques over %zu products, all commuting: %s, per-vertex classes match: %s, %.3f s",
                 cover.cliques.size(), nodes, commuting ? "yes" : "no", classes ? "yes" : "no", sec);
  return o;
}

// Mean |PSV - ideal| over a window divided by the same for the noisy mean.
double late_ratio(const Tracks& t, double lo, double hi) {
  double psv = 0.0, noisy = 0.0;
  for (std::size_t k = 0; k < t.psv.rows.size(); ++k) {
    if (t.psv.rows[k].t < lo || t.psv.rows[k].t > hi) continue;
    psv += std::abs(t.psv.rows[k].mean_op1 - t.ideal.rows[k].mean_op1);
    noisy += std::abs(t.noisy.rows[k].mean_op1 - t.ideal.rows[k].mean_op1);
  }
  return psv / noisy;
}

Outcome criterion12(const SimulationModel& model2) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t steps = 60;  // t/a = 15
  const SimulationModel model3(build_d3(), 3, {kInvG2}, kDt);
  const Ensemble e3 = run_pair(model3, NoiseKind::dephasing, 0.245, steps, 145);
  const Tracks t3 = tracks(model3, e3, 145);
  const Ensemble e2 = run_pair(model2, NoiseKind::dephasing, 0.2, steps, 500);
  const Tracks t2 = tracks(model2, e2, 500);
  const double dps_early = max_dev(t3.dps, t3.ideal, 0.0, 5.0);
  const double psv_early = max_dev(t3.psv, t3.ideal, 0.0, 5.0);
  const double r3 = late_ratio(t3, 10.0, 15.0);
  const double r2 = late_ratio(t2, 10.0, 15.0);
  Outcome o;
  o.pass = dps_early <= 0.15 && psv_early <= 0.15 && r3 < r2;
  o.detail = fmt("n=3 dephasing g=0.245 M=145: max dev t/a<=5 DPS %.3f PSV %.3f; late |PSV-ideal|/|noisy-ideal| "
                 "over t/a in [10,15]: n=3 %.3f vs n=2 (g=0.2, M=500) %.3f; %.0f s",
                 dps_early, psv_early, r3, r2, seconds_since(t0));
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::fprintf(stderr, "acceptance: %zu worker thread(s)\n", threads());
  const SimulationModel model(build_d3(), 2, {kInvG2}, kDt);

  std::vector<std::pair<int, std::function<Outcome()>>> jobs;
  // Householder ensembles for the survival, saturation, mitigation, and efficacy criteria.
  // Step counts reach P_s ~ exp(-1.6) under the f(gamma)/dt law; gamma = 0.3 runs to t/a = 40.
  std::vector<Ensemble> hh;
  auto ensembles = [&]() -> const std::vector<Ensemble>& {
    if (hh.empty()) {
      for (double g : {0.1, 0.2, 0.3}) {
        const auto steps = g == 0.3 ? std::size_t{160}
                                    : static_cast<std::size_t>(std::ceil(1.6 / f_gamma(g, 1296)));
        hh.push_back(run_pair(model, NoiseKind::householder, g, steps, 1000));
      }
    }
    return hh;
  };

  jobs.emplace_back(1, [] { return criterion1(); });
  jobs.emplace_back(2, [&] { return criterion2(model); });
  jobs.emplace_back(3, [&] { return criterion3(model); });
  jobs.emplace_back(4, [] { return criterion4(); });
  jobs.emplace_back(5, [] { return criterion5(); });
  jobs.emplace_back(6, [&] {
    const auto& e = ensembles();
    return criterion6({&e[0], &e[1], &e[2]});
  });
  jobs.emplace_back(7, [&] { return criterion7(model, ensembles()[2]); });
  jobs.emplace_back(8, [&] { return criterion8(model, ensembles()[1], ensembles()[2]); });
  jobs.emplace_back(9, [&] { return criterion9(model, ensembles()[2]); });
  jobs.emplace_back(10, [] { return criterion10(); });
  jobs.emplace_back(11, [] { return criterion11(); });
  jobs.emplace_back(12, [&] { return criterion12(model); });

  int failures = 0;
  for (auto& [id, job] : jobs) {
    Outcome o;
    try {
      o = job();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %2d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
  }
  std::fprintf(stderr, "acceptance: %d failing, %.0f s total\n", failures, seconds_since(start));
  return failures;
}
