#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qlgt/model.hpp"
#include "qlgt/records.hpp"
#include "qlgt/rng.hpp"

namespace qlgt {

// ---------------------------------------------------------------------------
// Dynamical post-selection
// ---------------------------------------------------------------------------

struct ScheduleEntry {
  std::size_t vertex;
  Element element;
};

/// Cyclic list of Gauss-law checks; Trotter step n >= 1 uses entry (n - 1) mod size.
struct MeasurementSchedule {
  std::vector<ScheduleEntry> entries;

  const ScheduleEntry& for_step(std::size_t step) const {
    return entries[(step - 1) % entries.size()];
  }
};

/// (v1,g1),(v2,g1),...,(vV,g1),(v1,g2),... over every non-identity element.
MeasurementSchedule default_schedule(const LatticeGeometry& geom, const FiniteGroup& group);

/// Throws std::invalid_argument unless every (v, g != e) appears exactly once.
void validate_schedule(const MeasurementSchedule& schedule, const LatticeGeometry& geom,
                       const FiniteGroup& group);

struct DpsOutcome {
  std::size_t outcome = 0;  // eigenvalue exp(2 pi i outcome / ord g)
  Complex eigenvalue = 1.0;
  bool satisfied = true;
  std::vector<double> probabilities;
};

/// Eigenvalue-k spectral projector of Theta_{g,v} applied to `state`:
/// P_k = (1/ord) sum_m exp(-2 pi i k m / ord) Theta_{g,v}^m.
QuditState apply_spectral_projector(const QuditState& state, const GaugeActions& actions,
                                    const FiniteGroup& group, std::size_t vertex, Element g,
                                    std::size_t k);

/// Projective measurement of Theta_{g,v} with Born sampling from `rng`.
/// The state is replaced by the normalized post-measurement state.
DpsOutcome dps_measure(QuditState& state, const GaugeActions& actions,
                       const FiniteGroup& group, std::size_t vertex, Element g,
                       StreamRng& rng);
/// Same, with the uniform variate supplied by the caller.
DpsOutcome dps_measure(QuditState& state, const GaugeActions& actions,
                       const FiniteGroup& group, std::size_t vertex, Element g,
                       double uniform);

/// Dense spectral projectors of Theta_{g,v} on its incident links
/// (local order as in GaussOperator::links), indexed by outcome k.
std::vector<CMatrix> local_spectral_projectors(const LatticeGeometry& geom,
                                               const FiniteGroup& group, std::size_t vertex,
                                               Element g);

struct DpsSeries {
  std::vector<double> t;
  std::vector<double> mean;    // <O_P1> over surviving trajectories
  std::vector<double> stddev;  // sample standard deviation over survivors
  std::vector<double> stderr_;
  std::vector<std::size_t> survivors;
  std::size_t horizon = 0;  // number of leading steps with at least one survivor
};

DpsSeries dps_ensemble_average(const std::vector<TrajectoryRecord>& records);

// ---------------------------------------------------------------------------
// Post-processed symmetry verification
// ---------------------------------------------------------------------------

struct PsvPoint {
  double estimate = kMissing;  // NaN when the mean denominator vanishes
  double mean_numerator = 0.0;
  double mean_denominator = 0.0;
  bool defined = false;
};

/// Ratio of ensemble means per step: numerators[traj][step], denominators[traj][step].
std::vector<PsvPoint> psv_estimate(const std::vector<std::vector<double>>& numerators,
                                   const std::vector<std::vector<double>>& denominators);
/// PSV estimate of <O_P1> from the samples stored in trajectory records.
std::vector<PsvPoint> psv_estimate(const std::vector<TrajectoryRecord>& records);

struct CorrelatorTerm {
  std::vector<Element> elements;  // g_v per vertex
  Complex numerator;              // <psi| O prod_v Theta_{g_v,v} |psi>
  Complex denominator;            // <psi| prod_v Theta_{g_v,v} |psi>
};

/// Every term of the explicit sum over G^V. Averages reproduce
/// symmetric_numerator and symmetric_weight.
std::vector<CorrelatorTerm> psv_correlator_decomposition(const QuditState& state,
                                                         std::span<const double> observable,
                                                         const LatticeGeometry& geom,
                                                         const FiniteGroup& group);

struct CliqueCover {
  /// Per vertex, a partition of G into mutually commuting sets.
  std::vector<std::vector<std::vector<Element>>> vertex_classes;
  /// Partition of G^V; each node lists g_v per vertex.
  std::vector<std::vector<std::vector<Element>>> cliques;
};

/// Whether prod_v Theta_{a_v,v} and prod_v Theta_{b_v,v} commute, decided
/// link by link on the single-register permutations.
bool gauge_products_commute(const LatticeGeometry& geom, const FiniteGroup& group,
                            const std::vector<Element>& a, const std::vector<Element>& b);

/// Greedy (largest-first) clique cover of the commutation graph of G^V,
/// seeded by products of per-vertex commuting classes.
CliqueCover commutation_cliques(const LatticeGeometry& geom, const FiniteGroup& group);

}  // namespace qlgt
