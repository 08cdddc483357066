#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qlgt/model.hpp"

namespace qlgt {

enum class GateKind { qft, phase, trace, inversion, ctrl_mult, ctrl_perm, basis_rot, ancilla_inc };

std::string to_string(GateKind kind);

/// One primitive. Targets are register indices: single-register gates use
/// targets[0]; controlled gates use targets = {control, target}.
///
///  qft          F (Fourier basis to group basis), or F^dag when `inverse`
///  phase        diag exp(i angles[c]) over Fourier columns c
///  trace        diag exp(i angles[g]) over group elements g
///  inversion    |g> -> |g^-1>
///  ctrl_mult    |c>|h> -> |c>|c h>, or |c>|c^-1 h> when `inverse`; |G|-1 ctrl_perm
///  ctrl_perm    target |h> -> |perm[h]> when control = control_value
///  basis_rot    single-register unitary `matrix`
///  ancilla_inc  ancilla += increment mod dim when control = control_value
struct Gate {
  GateKind kind = GateKind::phase;
  std::vector<std::size_t> targets;
  bool inverse = false;
  std::vector<double> angles;
  std::size_t control_value = 0;
  std::size_t increment = 0;
  IndexMap perm;
  CMatrix matrix;
};

struct GateSequence {
  std::size_t group_order = 0;
  std::vector<Gate> gates;

  void append(const GateSequence& other);
};

/// Register dimensions: the link registers followed by any ancillas.
struct RegisterSpec {
  std::vector<std::size_t> dims;

  std::size_t total_dim() const;
  static RegisterSpec links(const LatticeGeometry& geom, const FiniteGroup& group,
                            std::vector<std::size_t> ancilla_dims = {});
};

/// QFT^-1, phase(-eps_j dt), QFT on one link.
GateSequence compile_electric_step(const FiniteGroup& group, const CouplingParams& coupling,
                                   double dt, std::size_t link,
                                   std::string_view irrep_label = "tau");

/// exp(-i H_B^(p) dt) for one plaquette: control multiplications accumulate the
/// plaquette product on one register, a trace gate applies the phase, and the
/// accumulation is undone.
GateSequence compile_plaquette_step(const LatticeGeometry& geom, const FiniteGroup& group,
                                    const CouplingParams& coupling, double dt,
                                    std::size_t plaquette,
                                    std::string_view irrep_label = "tau");

/// Magnetic factors for every plaquette, then electric factors on every link.
GateSequence compile_trotter_step(const LatticeGeometry& geom, const FiniteGroup& group,
                                  const CouplingParams& coupling, double dt,
                                  std::string_view irrep_label = "tau");

struct DpsCheckCircuit {
  GateSequence sequence;
  std::size_t ancilla_register = 0;
  std::size_t ancilla_dim = 0;
};

/// Measures the eigenvalue index of Theta_{g,v} onto an ancilla register placed
/// after the links. The ancilla ends in |0> exactly on the eigenvalue-1 subspace.
DpsCheckCircuit compile_dps_check(const LatticeGeometry& geom, const FiniteGroup& group,
                                  std::size_t vertex, Element g);

/// Renumbers targets so that registers[i] becomes register i. Throws
/// std::invalid_argument if a target is not listed.
GateSequence remap_registers(const GateSequence& seq, const std::vector<std::size_t>& registers);

/// Applies one gate to a state on `spec`.
void apply_gate(CVector& state, const RegisterSpec& spec, const Gate& gate,
                const FiniteGroup& group);

/// Dense unitary of a sequence. Throws std::length_error above 10^4 dimensions.
CMatrix sequence_unitary(const GateSequence& seq, const RegisterSpec& spec,
                         const FiniteGroup& group);

struct ResourceReport {
  std::map<std::string, std::size_t> counts;  // per gate kind
  std::size_t control_permutations = 0;       // ctrl_perm + (|G|-1) ctrl_mult + ancilla_inc
  std::vector<std::size_t> ancilla_dims;
};

ResourceReport resource_report(const GateSequence& seq,
                               std::vector<std::size_t> ancilla_dims = {});

std::string resource_report_to_json_text(const ResourceReport& report);
/// One gate per line: kind, targets, parameters.
std::string sequence_to_text(const GateSequence& seq);

}  // namespace qlgt
