#include "qlgt/compile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qlgt {

namespace {

constexpr std::size_t kSequenceDimLimit = 10000;

Gate single(GateKind kind, std::size_t target) {
  Gate g;
  g.kind = kind;
  g.targets = {target};
  return g;
}

Gate ctrl_mult(std::size_t control, std::size_t target, bool inverse) {
  Gate g;
  g.kind = GateKind::ctrl_mult;
  g.targets = {control, target};
  g.inverse = inverse;
  return g;
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::qft: return "qft";
    case GateKind::phase: return "phase";
    case GateKind::trace: return "trace";
    case GateKind::inversion: return "inversion";
    case GateKind::ctrl_mult: return "ctrl_mult";
    case GateKind::ctrl_perm: return "ctrl_perm";
    case GateKind::basis_rot: return "basis_rot";
    case GateKind::ancilla_inc: return "ancilla_inc";
  }
  return "unknown";
}

void GateSequence::append(const GateSequence& other) {
  if (group_order == 0) group_order = other.group_order;
  if (other.group_order != 0 && other.group_order != group_order) {
    throw std::invalid_argument("GateSequence::append: group order mismatch");
  }
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

std::size_t RegisterSpec::total_dim() const {
  std::size_t d = 1;
  for (std::size_t x : dims) d *= x;
  return d;
}

RegisterSpec RegisterSpec::links(const LatticeGeometry& geom, const FiniteGroup& group,
                                 std::vector<std::size_t> ancilla_dims) {
  RegisterSpec spec;
  spec.dims.assign(geom.n_links(), group.order());
  spec.dims.insert(spec.dims.end(), ancilla_dims.begin(), ancilla_dims.end());
  return spec;
}

GateSequence compile_electric_step(const FiniteGroup& group, const CouplingParams& coupling,
                                   double dt, std::size_t link, std::string_view irrep_label) {
  const auto eps = electric_irrep_energies(coupling, group, irrep_label);
  const auto columns = fourier_column_irreps(group);
  GateSequence seq;
  seq.group_order = group.order();

  Gate to_fourier = single(GateKind::qft, link);
  to_fourier.inverse = true;
  Gate phase = single(GateKind::phase, link);
  for (std::size_t j : columns) phase.angles.push_back(-eps[j] * dt);
  seq.gates = {to_fourier, phase, single(GateKind::qft, link)};
  return seq;
}

GateSequence compile_plaquette_step(const LatticeGeometry& geom, const FiniteGroup& group,
                                    const CouplingParams& coupling, double dt,
                                    std::size_t plaquette, std::string_view irrep_label) {
  if (plaquette >= geom.plaquettes.size()) {
    throw std::out_of_range("compile_plaquette_step: plaquette index out of range");
  }
  const auto& f = geom.plaquettes[plaquette].factors;
  // The ladder plaquette is U_a U_b U_a^dag U_c^dag; the product is accumulated on c.
  if (f[0].dagger || f[1].dagger || !f[2].dagger || !f[3].dagger || f[0].link != f[2].link) {
    throw std::invalid_argument("compile_plaquette_step: unsupported plaquette layout");
  }
  const std::size_t a = f[0].link, b = f[1].link, c = f[3].link;

  GateSequence seq;
  seq.group_order = group.order();
  auto& g = seq.gates;

  // Compute: c -> c^-1 -> a^-1 c^-1 -> b a^-1 c^-1 -> a b a^-1 c^-1.
  g.push_back(single(GateKind::inversion, c));
  g.push_back(single(GateKind::inversion, a));
  g.push_back(ctrl_mult(a, c, false));
  g.push_back(single(GateKind::inversion, a));
  g.push_back(ctrl_mult(b, c, false));
  g.push_back(ctrl_mult(a, c, false));

  Gate trace = single(GateKind::trace, c);
  const Irrep& rep = group.irrep(irrep_label);
  for (Element x = 0; x < group.order(); ++x) {
    trace.angles.push_back(dt * coupling.inv_g2 * rep.characters[x].real());
  }
  g.push_back(trace);

  // Uncompute in reverse order.
  g.push_back(ctrl_mult(a, c, true));
  g.push_back(ctrl_mult(b, c, true));
  g.push_back(single(GateKind::inversion, a));
  g.push_back(ctrl_mult(a, c, true));
  g.push_back(single(GateKind::inversion, a));
  g.push_back(single(GateKind::inversion, c));
  return seq;
}

GateSequence compile_trotter_step(const LatticeGeometry& geom, const FiniteGroup& group,
                                  const CouplingParams& coupling, double dt,
                                  std::string_view irrep_label) {
  GateSequence seq;
  seq.group_order = group.order();
  for (std::size_t p = 0; p < geom.plaquettes.size(); ++p) {
    seq.append(compile_plaquette_step(geom, group, coupling, dt, p, irrep_label));
  }
  for (std::size_t l = 0; l < geom.n_links(); ++l) {
    seq.append(compile_electric_step(group, coupling, dt, l, irrep_label));
  }
  return seq;
}

DpsCheckCircuit compile_dps_check(const LatticeGeometry& geom, const FiniteGroup& group,
                                  std::size_t vertex, Element g) {
  if (g == FiniteGroup::identity()) throw std::invalid_argument("compile_dps_check: g must not be e");
  const GaussOperator op = gauss_operator(geom, vertex, g, group);
  const std::size_t ord = group.element_order(g);

  DpsCheckCircuit out;
  out.ancilla_register = geom.n_links();
  out.ancilla_dim = ord;
  out.sequence.group_order = group.order();

  for (std::size_t i = 0; i < op.links.size(); ++i) {
    const CMatrix p = permutation_matrix(op.factors[i]);
    // Hermitian sum_k k P_k: its eigenvectors diagonalize the link factor and
    // its eigenvalues are the phase indices k.
    std::vector<CMatrix> powers{CMatrix::Identity(p.rows(), p.cols())};
    for (std::size_t m = 1; m < ord; ++m) powers.push_back(p * powers.back());
    CMatrix h = CMatrix::Zero(p.rows(), p.cols());
    for (std::size_t k = 1; k < ord; ++k) {
      for (std::size_t m = 0; m < ord; ++m) {
        h += static_cast<double>(k) *
             std::polar(1.0 / static_cast<double>(ord),
                        -2.0 * std::numbers::pi * static_cast<double>(k * m % ord) /
                            static_cast<double>(ord)) *
             powers[m];
      }
    }
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);

    Gate to_eigen = single(GateKind::basis_rot, op.links[i]);
    to_eigen.matrix = eig.eigenvectors().adjoint();
    out.sequence.gates.push_back(to_eigen);
    for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j) {
      const auto k = static_cast<std::size_t>(std::lround(eig.eigenvalues()[j]));
      if (k % ord == 0) continue;
      Gate inc;
      inc.kind = GateKind::ancilla_inc;
      inc.targets = {op.links[i], out.ancilla_register};
      inc.control_value = static_cast<std::size_t>(j);
      inc.increment = k % ord;
      out.sequence.gates.push_back(inc);
    }
    Gate back = single(GateKind::basis_rot, op.links[i]);
    back.matrix = eig.eigenvectors();
    out.sequence.gates.push_back(back);
  }
  return out;
}

namespace {

struct Layout {
  std::vector<std::size_t> strides;
  std::size_t total = 1;

  explicit Layout(const RegisterSpec& spec) {
    for (std::size_t d : spec.dims) {
      strides.push_back(total);
      total *= d;
    }
  }
};

// The helpers act on the row index of `state`, so the same code updates a
// single state vector or every column of a unitary at once.
template <typename Dense>
void apply_local(Dense& state, const RegisterSpec& spec, const Layout& lay, std::size_t reg,
                 const CMatrix& m) {
  const auto d = static_cast<Eigen::Index>(spec.dims[reg]);
  const std::size_t stride = lay.strides[reg];
  CMatrix buf(d, state.cols());
  for (std::size_t base = 0; base < lay.total; ++base) {
    if ((base / stride) % spec.dims[reg] != 0) continue;
    for (Eigen::Index x = 0; x < d; ++x) {
      buf.row(x) = state.row(static_cast<Eigen::Index>(base + static_cast<std::size_t>(x) * stride));
    }
    const CMatrix res = m * buf;
    for (Eigen::Index y = 0; y < d; ++y) {
      state.row(static_cast<Eigen::Index>(base + static_cast<std::size_t>(y) * stride)) = res.row(y);
    }
  }
}

template <typename Dense>
void apply_diag(Dense& state, const RegisterSpec& spec, const Layout& lay, std::size_t reg,
                const std::vector<Complex>& diag) {
  const std::size_t d = spec.dims[reg];
  for (std::size_t i = 0; i < lay.total; ++i) {
    state.row(static_cast<Eigen::Index>(i)) *= diag[(i / lay.strides[reg]) % d];
  }
}

// Target |h> -> |map[h]> wherever the control register holds `value`.
template <typename Dense>
void apply_controlled_map(Dense& state, const RegisterSpec& spec, const Layout& lay,
                          std::size_t control, std::size_t value, std::size_t target,
                          const IndexMap& map) {
  const std::size_t dc = spec.dims[control], dt = spec.dims[target];
  const std::size_t sc = lay.strides[control], st = lay.strides[target];
  const Dense in = state;
  for (std::size_t i = 0; i < lay.total; ++i) {
    if ((i / sc) % dc != value) continue;
    const std::size_t h = (i / st) % dt;
    const std::size_t j = i + map[h] * st - h * st;
    state.row(static_cast<Eigen::Index>(j)) = in.row(static_cast<Eigen::Index>(i));
  }
}

void check_targets(const RegisterSpec& spec, const Gate& gate, std::size_t expected) {
  if (gate.targets.size() != expected) {
    throw std::invalid_argument(to_string(gate.kind) + ": expected " + std::to_string(expected) +
                                " targets");
  }
  for (std::size_t t : gate.targets) {
    if (t >= spec.dims.size()) {
      throw std::out_of_range(to_string(gate.kind) + ": register " + std::to_string(t) +
                              " out of range");
    }
  }
}

template <typename Dense>
void apply_gate_rows(Dense& state, const RegisterSpec& spec, const Gate& gate,
                     const FiniteGroup& group) {
  const Layout lay(spec);
  if (static_cast<std::size_t>(state.rows()) != lay.total) {
    throw std::invalid_argument("apply_gate: state size does not match register spec");
  }
  const std::size_t n = group.order();
  switch (gate.kind) {
    case GateKind::qft: {
      check_targets(spec, gate, 1);
      const CMatrix f = fourier_matrix(group);
      apply_local(state, spec, lay, gate.targets[0], gate.inverse ? CMatrix(f.adjoint()) : f);
      break;
    }
    case GateKind::phase:
    case GateKind::trace: {
      check_targets(spec, gate, 1);
      if (gate.angles.size() != spec.dims[gate.targets[0]]) {
        throw std::invalid_argument(to_string(gate.kind) + ": angle table size mismatch");
      }
      std::vector<Complex> diag;
      for (double a : gate.angles) diag.push_back(std::polar(1.0, a));
      apply_diag(state, spec, lay, gate.targets[0], diag);
      break;
    }
    case GateKind::inversion: {
      check_targets(spec, gate, 1);
      IndexMap inv(n);
      for (Element x = 0; x < n; ++x) inv[x] = group.inverse(x);
      apply_local(state, spec, lay, gate.targets[0], permutation_matrix(inv));
      break;
    }
    case GateKind::ctrl_mult: {
      check_targets(spec, gate, 2);
      for (Element c = 1; c < n; ++c) {
        const Element m = gate.inverse ? group.inverse(c) : c;
        apply_controlled_map(state, spec, lay, gate.targets[0], c, gate.targets[1],
                             left_mult_map(group, m));
      }
      break;
    }
    case GateKind::ctrl_perm: {
      check_targets(spec, gate, 2);
      apply_controlled_map(state, spec, lay, gate.targets[0], gate.control_value,
                           gate.targets[1], gate.perm);
      break;
    }
    case GateKind::basis_rot: {
      check_targets(spec, gate, 1);
      apply_local(state, spec, lay, gate.targets[0], gate.matrix);
      break;
    }
    case GateKind::ancilla_inc: {
      check_targets(spec, gate, 2);
      const std::size_t d = spec.dims[gate.targets[1]];
      IndexMap shift(d);
      for (std::size_t x = 0; x < d; ++x) shift[x] = (x + gate.increment) % d;
      apply_controlled_map(state, spec, lay, gate.targets[0], gate.control_value,
                           gate.targets[1], shift);
      break;
    }
  }
}

}  // namespace

GateSequence remap_registers(const GateSequence& seq,
                             const std::vector<std::size_t>& registers) {
  GateSequence out = seq;
  for (auto& gate : out.gates) {
    for (auto& t : gate.targets) {
      const auto it = std::find(registers.begin(), registers.end(), t);
      if (it == registers.end()) {
        throw std::invalid_argument("remap_registers: register " + std::to_string(t) +
                                    " is not in the new layout");
      }
      t = static_cast<std::size_t>(it - registers.begin());
    }
  }
  return out;
}

void apply_gate(CVector& state, const RegisterSpec& spec, const Gate& gate,
                const FiniteGroup& group) {
  apply_gate_rows(state, spec, gate, group);
}

CMatrix sequence_unitary(const GateSequence& seq, const RegisterSpec& spec,
                         const FiniteGroup& group) {
  const std::size_t dim = spec.total_dim();
  if (dim > kSequenceDimLimit) {
    throw std::length_error("sequence_unitary: dimension " + std::to_string(dim) +
                            " exceeds 10^4");
  }
  CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& gate : seq.gates) apply_gate_rows(u, spec, gate, group);
  return u;
}

ResourceReport resource_report(const GateSequence& seq, std::vector<std::size_t> ancilla_dims) {
  ResourceReport r;
  for (GateKind k : {GateKind::qft, GateKind::phase, GateKind::trace, GateKind::inversion,
                     GateKind::ctrl_mult, GateKind::ctrl_perm, GateKind::basis_rot,
                     GateKind::ancilla_inc}) {
    r.counts[to_string(k)] = 0;
  }
  for (const auto& g : seq.gates) ++r.counts[to_string(g.kind)];
  const std::size_t per_mult = seq.group_order > 0 ? seq.group_order - 1 : 0;
  r.control_permutations = r.counts["ctrl_perm"] + per_mult * r.counts["ctrl_mult"] +
                           r.counts["ancilla_inc"];
  r.ancilla_dims = std::move(ancilla_dims);
  return r;
}

std::string resource_report_to_json_text(const ResourceReport& report) {
  nlohmann::ordered_json j;
  j["counts"] = report.counts;
  j["control_permutations"] = report.control_permutations;
  j["ancilla_count"] = report.ancilla_dims.size();
  j["ancilla_dims"] = report.ancilla_dims;
  return j.dump(2);
}

std::string sequence_to_text(const GateSequence& seq) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& g : seq.gates) {
    os << to_string(g.kind) << " targets=";
    for (std::size_t i = 0; i < g.targets.size(); ++i) os << (i ? "," : "") << g.targets[i];
    switch (g.kind) {
      case GateKind::qft:
        os << " direction=" << (g.inverse ? "inverse" : "forward");
        break;
      case GateKind::phase:
      case GateKind::trace:
        os << " angles=";
        for (std::size_t i = 0; i < g.angles.size(); ++i) os << (i ? "," : "") << g.angles[i];
        break;
      case GateKind::ctrl_mult:
        os << " direction=" << (g.inverse ? "inverse" : "forward");
        break;
      case GateKind::ctrl_perm:
        os << " control_value=" << g.control_value << " perm=";
        for (std::size_t i = 0; i < g.perm.size(); ++i) os << (i ? "," : "") << g.perm[i];
        break;
      case GateKind::basis_rot:
        os << " dim=" << g.matrix.rows();
        break;
      case GateKind::ancilla_inc:
        os << " control_value=" << g.control_value << " increment=" << g.increment;
        break;
      case GateKind::inversion:
        break;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qlgt
