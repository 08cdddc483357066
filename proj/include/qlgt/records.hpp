#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "qlgt/group.hpp"

namespace qlgt {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Observables recorded after step `step` (step 0 is the initial state).
struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;      // t/a
  double op1 = 0.0;    // <O_P1>, the first plaquette
  double h_e = 0.0;
  double h_b = 0.0;
  /// <Theta_{g,v}> for g != e, index v * (|G| - 1) + (g - 1).
  std::vector<Complex> gauss;
  double psv_den = kMissing;     // <psi|Pi_s|psi>
  double psv_num_op1 = kMissing; // <psi|O_P1 Pi_s|psi>
  double psv_num_hb = kMissing;  // <psi|H_B Pi_s|psi>
  bool survived = true;          // every DPS check so far returned eigenvalue 1
};

struct DpsEvent {
  std::size_t step = 0;
  std::size_t vertex = 0;
  Element element = 0;
  std::size_t outcome = 0;  // eigenvalue exp(2 pi i outcome / ord g)
  bool survived = true;
};

struct TrajectoryRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<DpsEvent> dps_log;
};

}  // namespace qlgt
