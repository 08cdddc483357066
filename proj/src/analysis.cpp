#include "qlgt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlgt {

double plaquette_expectation(const QuditState& state, const LatticeGeometry& geom,
                             const FiniteGroup& group, std::size_t plaquette,
                             std::string_view irrep_label) {
  if (plaquette >= geom.plaquettes.size()) {
    throw std::out_of_range("plaquette index " + std::to_string(plaquette) + " out of range");
  }
  return expectation_diagonal(state, plaquette_trace_table(geom, group, plaquette, irrep_label));
}

double gv_normalization(const LatticeGeometry& geom, const FiniteGroup& group,
                        std::size_t vertex, Element g) {
  const std::size_t ord = group.element_order(g);
  const IndexMap map = gauss_operator(geom, vertex, g, group).local_map(group.order());
  const auto counts = permutation_phase_counts(map, ord);
  double k = 0.0;
  for (std::size_t m = 0; m < ord; ++m) {
    if (counts[m] == 0) continue;
    const Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) /
                                               static_cast<double>(ord));
    k = std::max(k, std::abs(lambda - 1.0));
  }
  return k;
}

double gauge_violation(Complex expectation, double k) {
  if (k <= 0.0) return 0.0;
  return std::abs(expectation - 1.0) / k;
}

double gauge_violation(const QuditState& state, const LatticeGeometry& geom,
                       const FiniteGroup& group, std::size_t vertex, Element g) {
  if (g == FiniteGroup::identity()) throw std::invalid_argument("gauge_violation: g must not be e");
  const Complex ev = overlap_after_permutation(state, gauss_permutation(geom, vertex, g, group));
  return gauge_violation(ev, gv_normalization(geom, group, vertex, g));
}

std::vector<double> gv_normalizations(const LatticeGeometry& geom, const FiniteGroup& group) {
  std::vector<double> out;
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (Element g = 1; g < group.order(); ++g) out.push_back(gv_normalization(geom, group, v, g));
  }
  return out;
}

std::vector<double> cumulative_error(const std::vector<double>& series,
                                     const std::vector<double>& ideal) {
  if (series.size() != ideal.size()) throw std::invalid_argument("cumulative_error: length mismatch");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += std::abs(series[i] - ideal[i]);
    out[i] = acc;
  }
  return out;
}

std::vector<std::optional<double>> protection_efficacy(const std::vector<double>& series,
                                                       const std::vector<double>& noisy,
                                                       const std::vector<double>& ideal) {
  const auto e = cumulative_error(series, ideal);
  const auto e_noisy = cumulative_error(noisy, ideal);
  std::vector<std::optional<double>> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e_noisy[i] > 0.0) out[i] = 1.0 - e[i] / e_noisy[i];
  }
  return out;
}

std::vector<double> survival_series(const std::vector<TrajectoryRecord>& records,
                                    std::size_t n_steps) {
  std::vector<double> out(n_steps + 1, 0.0);
  if (records.empty()) return out;
  for (const auto& r : records) {
    for (const auto& s : r.steps) {
      if (s.step <= n_steps && s.survived) out[s.step] += 1.0;
    }
  }
  for (auto& x : out) x /= static_cast<double>(records.size());
  return out;
}

std::vector<double> collapse_time(const std::vector<double>& t, double gamma, std::size_t dim) {
  const double f = 1.0 - (1.0 - 2.0 / static_cast<double>(dim)) * std::exp(-0.5 * gamma * gamma);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] * f;
  return out;
}

std::optional<ExponentialFit> fit_exponential_rate(const std::vector<double>& t,
                                                   const std::vector<double>& y, double lo,
                                                   double hi, std::size_t min_points) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_exponential_rate: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] >= lo && y[i] <= hi) || y[i] <= 0.0) continue;
    const double ly = std::log(y[i]);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++n;
  }
  if (n < std::max<std::size_t>(min_points, 2)) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (dn * sxy - sx * sy) / denom;
  ExponentialFit fit;
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / dn;
  fit.points = n;
  return fit;
}

double noise_rescale(double gamma_base, double size_ratio) {
  if (!(size_ratio > 0.0)) throw std::invalid_argument("noise_rescale: size_ratio must be positive");
  return gamma_base * std::sqrt(size_ratio);
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::noiseless: return "noiseless";
    case Mode::noisy: return "noisy";
    case Mode::dps: return "dps";
    case Mode::psv: return "psv";
  }
  return "noiseless";
}

Mode parse_mode(std::string_view name) {
  if (name == "noiseless") return Mode::noiseless;
  if (name == "noisy") return Mode::noisy;
  if (name == "dps") return Mode::dps;
  if (name == "psv") return Mode::psv;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

namespace {

struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : kMissing; }
  double stddev() const {
    if (n == 0) return kMissing;
    if (n == 1) return 0.0;
    const double m = sum / static_cast<double>(n);
    return std::sqrt(std::max(0.0, (sum_sq - sum * m) / static_cast<double>(n - 1)));
  }
};

const StepRecord* step_of(const TrajectoryRecord& r, std::size_t step) {
  if (step < r.steps.size() && r.steps[step].step == step) return &r.steps[step];
  for (const auto& s : r.steps) {
    if (s.step == step) return &s;
  }
  return nullptr;
}

}  // namespace

ModeSeries summarize(Mode mode, const std::vector<TrajectoryRecord>& records,
                     std::size_t n_steps, double dt, const std::vector<double>& gv_norm) {
  ModeSeries out;
  out.mode = mode;
  const double m_total = static_cast<double>(records.size());
  for (std::size_t step = 0; step <= n_steps; ++step) {
    SeriesRow row;
    row.t = static_cast<double>(step) * dt;

    std::vector<const StepRecord*> valid;
    for (const auto& r : records) {
      const StepRecord* s = step_of(r, step);
      if (!s) continue;
      if (mode == Mode::dps && !s->survived) continue;
      if (mode == Mode::psv && std::isnan(s->psv_den)) continue;
      valid.push_back(s);
    }
    row.n_valid = valid.size();
    if (mode == Mode::dps && m_total > 0) row.p_s = static_cast<double>(valid.size()) / m_total;

    if (!valid.empty()) {
      Moments op, he, hb, num, den, num_hb;
      std::vector<Complex> gauss(gv_norm.size(), 0.0);
      bool have_psv = true;
      for (const StepRecord* s : valid) {
        op.add(s->op1);
        he.add(s->h_e);
        hb.add(s->h_b);
        for (std::size_t i = 0; i < gauss.size() && i < s->gauss.size(); ++i) gauss[i] += s->gauss[i];
        if (std::isnan(s->psv_den)) {
          have_psv = false;
        } else {
          num.add(s->psv_num_op1);
          den.add(s->psv_den);
          num_hb.add(s->psv_num_hb);
        }
      }
      const double n = static_cast<double>(valid.size());
      if (have_psv) {
        row.psv_num = num.mean();
        row.psv_den = den.mean();
      }
      if (mode == Mode::psv) {
        if (std::abs(row.psv_den) >= 1e-12) {
          const double ratio = row.psv_num / row.psv_den;
          row.mean_op1 = ratio;
          row.mean_hb = num_hb.mean() / row.psv_den;
          // Linearized spread of the ratio estimator.
          Moments z;
          for (const StepRecord* s : valid) z.add((s->psv_num_op1 - ratio * s->psv_den) / row.psv_den);
          row.std_op1 = z.stddev();
          row.stderr_op1 = row.std_op1 / std::sqrt(n);
        }
      } else {
        row.mean_op1 = op.mean();
        row.std_op1 = op.stddev();
        row.stderr_op1 = row.std_op1 / std::sqrt(n);
        row.mean_he = he.mean();
        row.mean_hb = hb.mean();
        if (!valid.front()->gauss.empty()) {
          row.gv.resize(gauss.size());
          for (std::size_t i = 0; i < gauss.size(); ++i) {
            row.gv[i] = gauge_violation(gauss[i] / n, gv_norm[i]);
          }
        }
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace qlgt
