#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlgt/group.hpp"

namespace qlgt {

/// Largest register dimension for which full-space dense matrices may be
/// built. 6^4 = 1296 fits; 6^6 = 46656 does not.
inline constexpr std::size_t kDenseDimLimit = 4096;

/// Throws std::length_error if a dense dim x dim matrix is not allowed.
void require_dense_allowed(std::size_t dim, const char* what);

/// Pure state of `sites` qudits with local dimension `local_dim`.
/// Basis index = sum_l x_l * local_dim^l (site 0 fastest).
class QuditState {
 public:
  QuditState(std::size_t sites, std::size_t local_dim);
  QuditState(std::size_t sites, std::size_t local_dim, CVector amplitudes);

  std::size_t sites() const { return sites_; }
  std::size_t local_dim() const { return local_dim_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }
  std::size_t stride(std::size_t site) const { return strides_[site]; }
  std::size_t digit(std::size_t index, std::size_t site) const {
    return (index / strides_[site]) % local_dim_;
  }

  CVector& amplitudes() { return amps_; }
  const CVector& amplitudes() const { return amps_; }
  Complex& operator[](std::size_t i) { return amps_[static_cast<Eigen::Index>(i)]; }
  const Complex& operator[](std::size_t i) const {
    return amps_[static_cast<Eigen::Index>(i)];
  }

  double norm() const { return amps_.norm(); }
  /// Rescales to unit norm and returns the previous norm.
  double normalize();

 private:
  std::size_t sites_;
  std::size_t local_dim_;
  std::vector<std::size_t> strides_;
  CVector amps_;
};

/// Full-space permutation in gather form: (P psi)[i] = psi[source[i]].
struct Permutation {
  std::vector<std::uint32_t> source;
};

void apply_link_unitary(QuditState& state, std::size_t link, const CMatrix& m);

/// Applies an operator on up to four sites. The local index of `m` follows the
/// declared order of `links` (links[0] fastest). With `normalize`, the result is
/// rescaled to unit norm; the returned value is the norm before rescaling.
/// Throws std::domain_error if `normalize` is set and the result vanishes.
double apply_multilink_operator(QuditState& state, std::span<const std::size_t> links,
                                const CMatrix& m, bool normalize);

/// amplitude[i] *= exp(-i phase[i])
void apply_diagonal_phase(QuditState& state, std::span<const double> phase);
void apply_diagonal_phase(QuditState& state, const std::function<double(std::size_t)>& phase);

void apply_permutation(QuditState& state, const Permutation& perm);
void apply_permutation(const QuditState& in, const Permutation& perm, QuditState& out);

double expectation_diagonal(const QuditState& state, std::span<const double> value);
double expectation_diagonal(const QuditState& state,
                            const std::function<double(std::size_t)>& value);
/// <a|b>
Complex inner(const QuditState& a, const QuditState& b);
/// <psi|Op|psi> for an operator on `links`.
Complex overlap_after_operator(const QuditState& state, std::span<const std::size_t> links,
                               const CMatrix& m);
/// <psi|P|psi> for a full-space permutation.
Complex overlap_after_permutation(const QuditState& state, const Permutation& perm);

/// Dense matrix of a local operator embedded in the full space (test scale only).
CMatrix embed_operator(std::size_t sites, std::size_t local_dim,
                       std::span<const std::size_t> links, const CMatrix& m);

std::string state_to_json_text(const QuditState& state);

}  // namespace qlgt
