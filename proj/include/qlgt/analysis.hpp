#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qlgt/model.hpp"
#include "qlgt/records.hpp"

namespace qlgt {

/// <Re Tr U_p> for plaquette p. Throws std::out_of_range for an invalid index.
double plaquette_expectation(const QuditState& state, const LatticeGeometry& geom,
                             const FiniteGroup& group, std::size_t plaquette,
                             std::string_view irrep_label = "tau");

/// k_g = max |lambda - 1| over the spectrum of Theta_{g,v}, read off the cycle
/// lengths of its permutation.
double gv_normalization(const LatticeGeometry& geom, const FiniteGroup& group,
                        std::size_t vertex, Element g);

/// |<Theta_{g,v}> - 1| / k_g
double gauge_violation(Complex expectation, double k);
double gauge_violation(const QuditState& state, const LatticeGeometry& geom,
                       const FiniteGroup& group, std::size_t vertex, Element g);

/// E*(t_n) = sum_{m <= n} |series_m - ideal_m|
std::vector<double> cumulative_error(const std::vector<double>& series,
                                     const std::vector<double>& ideal);

/// 1 - E*/E_noisy per time; empty where E_noisy vanishes.
std::vector<std::optional<double>> protection_efficacy(const std::vector<double>& series,
                                                       const std::vector<double>& noisy,
                                                       const std::vector<double>& ideal);

/// Fraction of trajectories that passed every check up to each step.
std::vector<double> survival_series(const std::vector<TrajectoryRecord>& records,
                                    std::size_t n_steps);

/// t/a -> (t/a) f(gamma)
std::vector<double> collapse_time(const std::vector<double>& t, double gamma, std::size_t dim);

struct ExponentialFit {
  double rate = 0.0;       // y ~ A exp(-rate t)
  double intercept = 0.0;  // ln A
  std::size_t points = 0;
};

/// Unweighted least squares of ln y on t over the points with y in [lo, hi].
/// Empty when fewer than `min_points` points fall in the window.
std::optional<ExponentialFit> fit_exponential_rate(const std::vector<double>& t,
                                                   const std::vector<double>& y,
                                                   double lo = 0.05, double hi = 1.0,
                                                   std::size_t min_points = 5);

/// gamma_base sqrt(size_ratio)
double noise_rescale(double gamma_base, double size_ratio);

enum class Mode { noiseless, noisy, dps, psv };
std::string to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// One time point of an ensemble series. Optional fields are reported empty.
struct SeriesRow {
  double t = 0.0;
  double mean_op1 = kMissing;
  double std_op1 = kMissing;
  double stderr_op1 = kMissing;
  std::size_t n_valid = 0;
  double mean_he = kMissing;
  double mean_hb = kMissing;
  std::vector<double> gv;  // index v * (|G| - 1) + (g - 1); empty if unavailable
  double psv_num = kMissing;
  double psv_den = kMissing;
  double p_s = kMissing;
};

struct ModeSeries {
  Mode mode = Mode::noiseless;
  std::vector<SeriesRow> rows;
};

/// Ensemble statistics for one mode, folded in trajectory-index order.
/// `n_steps` fixes the time grid; `gv_norm` holds k_g per (v, g != e).
ModeSeries summarize(Mode mode, const std::vector<TrajectoryRecord>& records,
                     std::size_t n_steps, double dt, const std::vector<double>& gv_norm);

/// k_g for every (v, g != e), in record order.
std::vector<double> gv_normalizations(const LatticeGeometry& geom, const FiniteGroup& group);

}  // namespace qlgt
