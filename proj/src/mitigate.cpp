#include "qlgt/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace qlgt {

MeasurementSchedule default_schedule(const LatticeGeometry& geom, const FiniteGroup& group) {
  MeasurementSchedule s;
  for (Element g = 1; g < group.order(); ++g) {
    for (std::size_t v = 0; v < geom.n_vertices(); ++v) s.entries.push_back({v, g});
  }
  return s;
}

void validate_schedule(const MeasurementSchedule& schedule, const LatticeGeometry& geom,
                       const FiniteGroup& group) {
  std::set<std::pair<std::size_t, Element>> seen;
  for (const auto& e : schedule.entries) {
    if (e.vertex >= geom.n_vertices() || e.element >= group.order() ||
        e.element == FiniteGroup::identity()) {
      throw std::invalid_argument("schedule: entry (" + std::to_string(e.vertex) + ", " +
                                  std::to_string(e.element) + ") is not a valid check");
    }
    if (!seen.insert({e.vertex, e.element}).second) {
      throw std::invalid_argument("schedule: entry (" + std::to_string(e.vertex) + ", " +
                                  std::to_string(e.element) + ") repeats within a cycle");
    }
  }
  if (seen.size() != geom.n_vertices() * (group.order() - 1)) {
    throw std::invalid_argument("schedule: cycle must contain every (vertex, g != e) once");
  }
}

namespace {

// Theta_{g,v}^m psi for m = 0 .. ord-1, using Theta_{g,v}^m = Theta_{g^m,v}.
std::vector<QuditState> vertex_powers(const QuditState& state, const GaugeActions& actions,
                                      const FiniteGroup& group, std::size_t vertex, Element g) {
  const std::size_t ord = group.element_order(g);
  std::vector<QuditState> powers;
  powers.reserve(ord);
  Element gm = FiniteGroup::identity();
  for (std::size_t m = 0; m < ord; ++m) {
    QuditState out = state;
    if (m > 0) apply_permutation(state, actions.at(vertex, gm), out);
    powers.push_back(std::move(out));
    gm = group.multiply(gm, g);
  }
  return powers;
}

QuditState combine_powers(const std::vector<QuditState>& powers, std::size_t k) {
  const std::size_t ord = powers.size();
  QuditState out = powers.front();
  out.amplitudes().setZero();
  for (std::size_t m = 0; m < ord; ++m) {
    const Complex c = std::polar(1.0 / static_cast<double>(ord),
                                 -2.0 * std::numbers::pi * static_cast<double>(k * m % ord) /
                                     static_cast<double>(ord));
    out.amplitudes() += c * powers[m].amplitudes();
  }
  return out;
}

}  // namespace

QuditState apply_spectral_projector(const QuditState& state, const GaugeActions& actions,
                                    const FiniteGroup& group, std::size_t vertex, Element g,
                                    std::size_t k) {
  return combine_powers(vertex_powers(state, actions, group, vertex, g), k);
}

DpsOutcome dps_measure(QuditState& state, const GaugeActions& actions,
                       const FiniteGroup& group, std::size_t vertex, Element g,
                       double uniform) {
  if (g == FiniteGroup::identity()) throw std::invalid_argument("dps_measure: g must not be e");
  const auto powers = vertex_powers(state, actions, group, vertex, g);
  const std::size_t ord = powers.size();

  std::vector<QuditState> branches;
  DpsOutcome out;
  double total = 0.0;
  for (std::size_t k = 0; k < ord; ++k) {
    branches.push_back(combine_powers(powers, k));
    const double p = branches.back().amplitudes().squaredNorm();
    out.probabilities.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::logic_error("dps_measure: Born probabilities sum to " + std::to_string(total));
  }

  std::size_t chosen = ord - 1;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < ord; ++k) {
    cumulative += out.probabilities[k];
    if (uniform * total < cumulative) {
      chosen = k;
      break;
    }
  }
  while (out.probabilities[chosen] == 0.0 && chosen > 0) --chosen;
  if (out.probabilities[chosen] == 0.0) {
    throw std::logic_error("dps_measure: sampled an outcome with zero probability");
  }

  state = std::move(branches[chosen]);
  state.normalize();
  out.outcome = chosen;
  out.eigenvalue = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(chosen) /
                                       static_cast<double>(ord));
  out.satisfied = chosen == 0;
  return out;
}

DpsOutcome dps_measure(QuditState& state, const GaugeActions& actions,
                       const FiniteGroup& group, std::size_t vertex, Element g,
                       StreamRng& rng) {
  return dps_measure(state, actions, group, vertex, g, rng.uniform());
}

std::vector<CMatrix> local_spectral_projectors(const LatticeGeometry& geom,
                                               const FiniteGroup& group, std::size_t vertex,
                                               Element g) {
  const GaussOperator op = gauss_operator(geom, vertex, g, group);
  const CMatrix theta = op.local_matrix();
  const std::size_t ord = group.element_order(g);
  std::vector<CMatrix> powers{CMatrix::Identity(theta.rows(), theta.cols())};
  for (std::size_t m = 1; m < ord; ++m) powers.push_back(theta * powers.back());
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < ord; ++k) {
    CMatrix p = CMatrix::Zero(theta.rows(), theta.cols());
    for (std::size_t m = 0; m < ord; ++m) {
      p += std::polar(1.0 / static_cast<double>(ord),
                      -2.0 * std::numbers::pi * static_cast<double>(k * m % ord) /
                          static_cast<double>(ord)) *
           powers[m];
    }
    out.push_back(std::move(p));
  }
  return out;
}

DpsSeries dps_ensemble_average(const std::vector<TrajectoryRecord>& records) {
  DpsSeries out;
  std::size_t max_steps = 0;
  for (const auto& r : records) max_steps = std::max(max_steps, r.steps.size());
  for (std::size_t s = 0; s < max_steps; ++s) {
    double sum = 0.0, sum_sq = 0.0, t = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (s >= r.steps.size() || !r.steps[s].survived) continue;
      const double x = r.steps[s].op1;
      sum += x;
      sum_sq += x * x;
      t = r.steps[s].t;
      ++n;
    }
    if (n == 0) break;
    const double mean = sum / static_cast<double>(n);
    const double var =
        n > 1 ? std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(n - 1)) : 0.0;
    out.t.push_back(t);
    out.mean.push_back(mean);
    out.stddev.push_back(std::sqrt(var));
    out.stderr_.push_back(std::sqrt(var / static_cast<double>(n)));
    out.survivors.push_back(n);
  }
  out.horizon = out.t.size();
  return out;
}

std::vector<PsvPoint> psv_estimate(const std::vector<std::vector<double>>& numerators,
                                   const std::vector<std::vector<double>>& denominators) {
  if (numerators.size() != denominators.size()) {
    throw std::invalid_argument("psv_estimate: numerator/denominator trajectory count mismatch");
  }
  std::size_t steps = 0;
  for (const auto& n : numerators) steps = std::max(steps, n.size());
  std::vector<PsvPoint> out(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    double num = 0.0, den = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < numerators.size(); ++i) {
      if (s >= numerators[i].size() || s >= denominators[i].size()) continue;
      num += numerators[i][s];
      den += denominators[i][s];
      ++count;
    }
    PsvPoint& p = out[s];
    if (count == 0) continue;
    p.mean_numerator = num / static_cast<double>(count);
    p.mean_denominator = den / static_cast<double>(count);
    p.defined = std::abs(p.mean_denominator) >= 1e-12;
    if (p.defined) p.estimate = p.mean_numerator / p.mean_denominator;
  }
  return out;
}

std::vector<PsvPoint> psv_estimate(const std::vector<TrajectoryRecord>& records) {
  std::vector<std::vector<double>> num, den;
  for (const auto& r : records) {
    auto& n = num.emplace_back();
    auto& d = den.emplace_back();
    for (const auto& s : r.steps) {
      if (std::isnan(s.psv_den)) break;
      n.push_back(s.psv_num_op1);
      d.push_back(s.psv_den);
    }
  }
  return psv_estimate(num, den);
}

std::vector<CorrelatorTerm> psv_correlator_decomposition(const QuditState& state,
                                                         std::span<const double> observable,
                                                         const LatticeGeometry& geom,
                                                         const FiniteGroup& group) {
  if (observable.size() != state.size()) {
    throw std::invalid_argument("psv_correlator_decomposition: observable length mismatch");
  }
  const GaugeActions actions(geom, group);
  const std::size_t n = group.order();
  const std::size_t verts = geom.n_vertices();
  std::size_t tuples = 1;
  for (std::size_t v = 0; v < verts; ++v) tuples *= n;

  std::vector<CorrelatorTerm> out;
  out.reserve(tuples);
  QuditState cur = state, next = state;
  for (std::size_t t = 0; t < tuples; ++t) {
    CorrelatorTerm term;
    std::size_t rem = t;
    cur = state;
    for (std::size_t v = 0; v < verts; ++v) {
      const Element g = rem % n;
      rem /= n;
      term.elements.push_back(g);
      apply_permutation(cur, actions.at(v, g), next);
      std::swap(cur, next);
    }
    const Complex* a = state.amplitudes().data();
    const Complex* b = cur.amplitudes().data();
    Complex num = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) num += std::conj(a[i]) * observable[i] * b[i];
    term.numerator = num;
    term.denominator = inner(state, cur);
    out.push_back(std::move(term));
  }
  return out;
}

namespace {

// Single-register map of prod_v Theta_{g_v,v} on link l.
IndexMap product_link_map(const LatticeGeometry& geom, const FiniteGroup& group,
                          const std::vector<Element>& g, std::size_t link) {
  IndexMap map(group.order());
  for (std::size_t x = 0; x < map.size(); ++x) map[x] = x;
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (const auto& end : geom.vertices[v].ends) {
      if (end.link != link) continue;
      const IndexMap f = link_factor_map(group, end.tag, g[v]);
      for (auto& x : map) x = f[x];
    }
  }
  return map;
}

// Greedy largest-first clique partition of nodes 0..n-1.
template <typename Adjacent>
std::vector<std::vector<std::size_t>> greedy_clique_partition(std::size_t n, Adjacent adjacent) {
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && adjacent(a, b)) ++degree[a];
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });

  std::vector<bool> covered(n, false);
  std::vector<std::vector<std::size_t>> cliques;
  for (std::size_t seed : order) {
    if (covered[seed]) continue;
    std::vector<std::size_t> clique{seed};
    covered[seed] = true;
    for (std::size_t cand : order) {
      if (covered[cand]) continue;
      const bool ok = std::all_of(clique.begin(), clique.end(),
                                  [&](std::size_t m) { return adjacent(cand, m); });
      if (ok) {
        clique.push_back(cand);
        covered[cand] = true;
      }
    }
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
  }
  return cliques;
}

}  // namespace

bool gauge_products_commute(const LatticeGeometry& geom, const FiniteGroup& group,
                            const std::vector<Element>& a, const std::vector<Element>& b) {
  for (std::size_t l = 0; l < geom.n_links(); ++l) {
    const IndexMap fa = product_link_map(geom, group, a, l);
    const IndexMap fb = product_link_map(geom, group, b, l);
    for (std::size_t x = 0; x < fa.size(); ++x) {
      if (fa[fb[x]] != fb[fa[x]]) return false;
    }
  }
  return true;
}

CliqueCover commutation_cliques(const LatticeGeometry& geom, const FiniteGroup& group) {
  const std::size_t n = group.order();
  const std::size_t verts = geom.n_vertices();
  CliqueCover cover;

  for (std::size_t v = 0; v < verts; ++v) {
    auto single = [&](Element g) {
      std::vector<Element> t(verts, FiniteGroup::identity());
      t[v] = g;
      return t;
    };
    auto parts = greedy_clique_partition(n, [&](std::size_t a, std::size_t b) {
      return gauge_products_commute(geom, group, single(a), single(b));
    });
    std::vector<std::vector<Element>> classes;
    for (auto& p : parts) classes.emplace_back(p.begin(), p.end());
    cover.vertex_classes.push_back(std::move(classes));
  }

  // Seed: Cartesian products of the per-vertex classes.
  std::vector<std::vector<std::vector<Element>>> cliques{{{}}};
  for (std::size_t v = 0; v < verts; ++v) {
    std::vector<std::vector<std::vector<Element>>> grown;
    for (const auto& clique : cliques) {
      for (const auto& cls : cover.vertex_classes[v]) {
        std::vector<std::vector<Element>> merged;
        for (const auto& node : clique) {
          for (Element g : cls) {
            auto t = node;
            t.push_back(g);
            merged.push_back(std::move(t));
          }
        }
        grown.push_back(std::move(merged));
      }
    }
    cliques = std::move(grown);
  }

  // Merge seeds whose union still commutes pairwise.
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (std::size_t i = 0; i < cliques.size() && !merged_any; ++i) {
      for (std::size_t j = i + 1; j < cliques.size() && !merged_any; ++j) {
        bool ok = true;
        for (const auto& a : cliques[i]) {
          for (const auto& b : cliques[j]) {
            if (!gauge_products_commute(geom, group, a, b)) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
        }
        if (ok) {
          cliques[i].insert(cliques[i].end(), cliques[j].begin(), cliques[j].end());
          cliques.erase(cliques.begin() + static_cast<std::ptrdiff_t>(j));
          merged_any = true;
        }
      }
    }
  }
  cover.cliques = std::move(cliques);
  return cover;
}

}  // namespace qlgt
