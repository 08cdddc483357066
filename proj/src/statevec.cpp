#include "qlgt/statevec.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace qlgt {

void require_dense_allowed(std::size_t dim, const char* what) {
  if (dim > kDenseDimLimit) {
    throw std::length_error(std::string(what) + ": dense operator of dimension " +
                            std::to_string(dim) + " exceeds the limit of " +
                            std::to_string(kDenseDimLimit));
  }
}

namespace {

std::vector<std::size_t> make_strides(std::size_t sites, std::size_t d) {
  std::vector<std::size_t> strides(sites + 1, 1);
  for (std::size_t s = 1; s <= sites; ++s) strides[s] = strides[s - 1] * d;
  return strides;
}

// Offsets of every local index of `links` (links[0] fastest) and the base
// indices where all of those digits are zero.
struct SubspaceLayout {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> bases;
};

SubspaceLayout layout_for(const QuditState& state, std::span<const std::size_t> links) {
  const std::size_t d = state.local_dim();
  std::size_t local = 1;
  for (std::size_t l : links) {
    if (l >= state.sites()) throw std::out_of_range("link index out of range");
    local *= d;
  }
  for (std::size_t a = 0; a < links.size(); ++a) {
    for (std::size_t b = a + 1; b < links.size(); ++b) {
      if (links[a] == links[b]) throw std::invalid_argument("links must be distinct");
    }
  }
  SubspaceLayout out;
  out.offsets.resize(local);
  for (std::size_t loc = 0; loc < local; ++loc) {
    std::size_t rem = loc, off = 0;
    for (std::size_t l : links) {
      off += (rem % d) * state.stride(l);
      rem /= d;
    }
    out.offsets[loc] = off;
  }
  out.bases.reserve(state.size() / local);
  for (std::size_t i = 0; i < state.size(); ++i) {
    bool zero = true;
    for (std::size_t l : links) zero = zero && state.digit(i, l) == 0;
    if (zero) out.bases.push_back(i);
  }
  return out;
}

}  // namespace

QuditState::QuditState(std::size_t sites, std::size_t local_dim)
    : sites_(sites), local_dim_(local_dim), strides_(make_strides(sites, local_dim)) {
  if (local_dim < 2) throw std::invalid_argument("QuditState: local_dim must be >= 2");
  amps_ = CVector::Zero(static_cast<Eigen::Index>(strides_[sites]));
  amps_[0] = 1.0;
}

QuditState::QuditState(std::size_t sites, std::size_t local_dim, CVector amplitudes)
    : QuditState(sites, local_dim) {
  if (static_cast<std::size_t>(amplitudes.size()) != strides_[sites]) {
    throw std::invalid_argument("QuditState: amplitude vector has length " +
                                std::to_string(amplitudes.size()) + ", expected " +
                                std::to_string(strides_[sites]));
  }
  amps_ = std::move(amplitudes);
}

double QuditState::normalize() {
  const double n = amps_.norm();
  if (n > 0.0) amps_ /= n;
  return n;
}

void apply_link_unitary(QuditState& state, std::size_t link, const CMatrix& m) {
  const std::size_t d = state.local_dim();
  if (link >= state.sites()) throw std::out_of_range("apply_link_unitary: bad link");
  if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d) {
    throw std::invalid_argument("apply_link_unitary: matrix is not d x d");
  }
#ifndef NDEBUG
  if ((m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm() > kOperatorTol) {
    throw std::invalid_argument("apply_link_unitary: matrix is not unitary");
  }
#endif
  const std::size_t stride = state.stride(link);
  const std::size_t block = stride * d;
  Complex* amp = state.amplitudes().data();
  const Complex* mat = m.data();  // column-major
  std::vector<Complex> in(d);
  for (std::size_t hi = 0; hi < state.size(); hi += block) {
    for (std::size_t lo = 0; lo < stride; ++lo) {
      Complex* base = amp + hi + lo;
      for (std::size_t k = 0; k < d; ++k) in[k] = base[k * stride];
      for (std::size_t r = 0; r < d; ++r) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += mat[k * d + r] * in[k];
        base[r * stride] = acc;
      }
    }
  }
}

double apply_multilink_operator(QuditState& state, std::span<const std::size_t> links,
                                const CMatrix& m, bool normalize) {
  if (links.empty() || links.size() > 4) {
    throw std::invalid_argument("apply_multilink_operator: between 1 and 4 links required");
  }
  const SubspaceLayout lay = layout_for(state, links);
  const auto local = static_cast<Eigen::Index>(lay.offsets.size());
  if (m.rows() != local || m.cols() != local) {
    throw std::invalid_argument("apply_multilink_operator: matrix dimension mismatch");
  }
  CVector buf(local), out(local);
  CVector& amp = state.amplitudes();
  for (std::size_t base : lay.bases) {
    for (Eigen::Index k = 0; k < local; ++k) buf[k] = amp[static_cast<Eigen::Index>(base + lay.offsets[k])];
    out.noalias() = m * buf;
    for (Eigen::Index k = 0; k < local; ++k) amp[static_cast<Eigen::Index>(base + lay.offsets[k])] = out[k];
  }
  const double n = state.norm();
  if (normalize) {
    if (n == 0.0) {
      throw std::domain_error("apply_multilink_operator: result has zero norm "
                              "(measurement of an impossible outcome)");
    }
    state.amplitudes() /= n;
  }
  return n;
}

void apply_diagonal_phase(QuditState& state, std::span<const double> phase) {
  if (phase.size() != state.size()) {
    throw std::invalid_argument("apply_diagonal_phase: table length mismatch");
  }
  Complex* amp = state.amplitudes().data();
  for (std::size_t i = 0; i < phase.size(); ++i) amp[i] *= std::polar(1.0, -phase[i]);
}

void apply_diagonal_phase(QuditState& state,
                          const std::function<double(std::size_t)>& phase) {
  Complex* amp = state.amplitudes().data();
  for (std::size_t i = 0; i < state.size(); ++i) amp[i] *= std::polar(1.0, -phase(i));
}

void apply_permutation(const QuditState& in, const Permutation& perm, QuditState& out) {
  if (perm.source.size() != in.size() || out.size() != in.size()) {
    throw std::invalid_argument("apply_permutation: size mismatch");
  }
  const Complex* src = in.amplitudes().data();
  Complex* dst = out.amplitudes().data();
  for (std::size_t i = 0; i < perm.source.size(); ++i) dst[i] = src[perm.source[i]];
}

void apply_permutation(QuditState& state, const Permutation& perm) {
  QuditState tmp = state;
  apply_permutation(tmp, perm, state);
}

double expectation_diagonal(const QuditState& state, std::span<const double> value) {
  if (value.size() != state.size()) {
    throw std::invalid_argument("expectation_diagonal: table length mismatch");
  }
  const Complex* amp = state.amplitudes().data();
  double acc = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) acc += std::norm(amp[i]) * value[i];
  return acc;
}

double expectation_diagonal(const QuditState& state,
                            const std::function<double(std::size_t)>& value) {
  const Complex* amp = state.amplitudes().data();
  double acc = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) acc += std::norm(amp[i]) * value(i);
  return acc;
}

Complex inner(const QuditState& a, const QuditState& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left operand
}

Complex overlap_after_operator(const QuditState& state, std::span<const std::size_t> links,
                               const CMatrix& m) {
  QuditState tmp = state;
  apply_multilink_operator(tmp, links, m, false);
  return inner(state, tmp);
}

Complex overlap_after_permutation(const QuditState& state, const Permutation& perm) {
  if (perm.source.size() != state.size()) {
    throw std::invalid_argument("overlap_after_permutation: size mismatch");
  }
  const Complex* amp = state.amplitudes().data();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < perm.source.size(); ++i) {
    acc += std::conj(amp[i]) * amp[perm.source[i]];
  }
  return acc;
}

CMatrix embed_operator(std::size_t sites, std::size_t local_dim,
                       std::span<const std::size_t> links, const CMatrix& m) {
  QuditState probe(sites, local_dim);
  require_dense_allowed(probe.size(), "embed_operator");
  const auto dim = static_cast<Eigen::Index>(probe.size());
  CMatrix full(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    probe.amplitudes().setZero();
    probe.amplitudes()[col] = 1.0;
    apply_multilink_operator(probe, links, m, false);
    full.col(col) = probe.amplitudes();
  }
  return full;
}

std::string state_to_json_text(const QuditState& state) {
  nlohmann::json doc;
  doc["sites"] = state.sites();
  doc["local_dim"] = state.local_dim();
  doc["basis"] = "index = sum_l x_l * local_dim^l";
  nlohmann::json amps = nlohmann::json::array();
  for (std::size_t i = 0; i < state.size(); ++i) {
    amps.push_back({state[i].real(), state[i].imag()});
  }
  doc["amplitudes"] = std::move(amps);
  return doc.dump();
}

}  // namespace qlgt
