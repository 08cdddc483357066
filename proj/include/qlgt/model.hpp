#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qlgt/group.hpp"
#include "qlgt/statevec.hpp"

namespace qlgt {

/// How a link end attaches to a vertex: L = outgoing (left multiplication),
/// R = ingoing (right multiplication), LR = vertical self-loop (both).
enum class EndTag { L, R, LR };

struct LinkEnd {
  std::size_t link;
  EndTag tag;
};

struct Link {
  std::size_t from;  // source vertex
  std::size_t to;    // target vertex; equal to `from` for vertical self-loops
  bool vertical;
};

struct Vertex {
  std::vector<LinkEnd> ends;
};

struct PlaquetteFactor {
  std::size_t link;
  bool dagger;
};

struct Plaquette {
  std::array<PlaquetteFactor, 4> factors;
};

/// Periodic one-row ladder of n plaquettes: horizontal links U_0..U_{n-1}
/// (U_i runs v_i -> v_{i+1 mod n}), vertical self-loops U_n..U_{2n-1}
/// (U_{n+i} sits at v_i). Plaquette i is (U_i, U_{n+(i+1 mod n)}, U_i^dag, U_{n+i}^dag).
struct LatticeGeometry {
  std::size_t n_plaquettes = 0;
  std::vector<Link> links;
  std::vector<Vertex> vertices;
  std::vector<Plaquette> plaquettes;

  std::size_t n_links() const { return links.size(); }
  std::size_t n_vertices() const { return vertices.size(); }
};

LatticeGeometry ladder_geometry(std::size_t n_plaquettes);

struct CouplingParams {
  double inv_g2 = 0.5;  // 1/g^2, lattice spacing a = 1
};

/// Re Tr of the plaquette product in irrep `irrep_label`, per basis index.
std::vector<double> plaquette_trace_table(const LatticeGeometry& geom, const FiniteGroup& group,
                                          std::size_t plaquette, std::string_view irrep_label);

/// Diagonal of H_B = -(1/g^2) sum_p Re Tr(U_p1 U_p2 U_p3^dag U_p4^dag), per basis index.
std::vector<double> magnetic_phase_table(const LatticeGeometry& geom,
                                         const CouplingParams& coupling,
                                         const FiniteGroup& group,
                                         std::string_view irrep_label);

/// Per-link transfer kernel K[g'][g] = exp{(1/g^2) Re chi(g'^-1 g)}.
CMatrix transfer_matrix(const CouplingParams& coupling, const FiniteGroup& group,
                        std::string_view irrep_label);

/// Per-link H_E = -ln K, built from the eigendecomposition of K. Throws
/// std::domain_error if K has a non-positive eigenvalue.
CMatrix electric_link_hamiltonian(const CouplingParams& coupling, const FiniteGroup& group,
                                  std::string_view irrep_label);

/// Electric energies per irrep from character sums:
/// lambda_j = (1/dim j) sum_h K(h) chi_j(h)^*, eps_j = -ln lambda_j.
std::vector<double> electric_irrep_energies(const CouplingParams& coupling,
                                            const FiniteGroup& group,
                                            std::string_view irrep_label);

/// Spectrum of a permutation whose order divides `order`, read off its cycles:
/// entry k counts eigenvalue exp(2 pi i k / order).
std::vector<std::size_t> permutation_phase_counts(const IndexMap& map, std::size_t order);

/// Single-register action of a Gauss-law factor with the given end tag.
IndexMap link_factor_map(const FiniteGroup& group, EndTag tag, Element g);

/// Gauss-law operator Theta_{g,v} restricted to the links incident to v.
struct GaussOperator {
  std::size_t vertex = 0;
  Element element = 0;
  std::vector<std::size_t> links;  // distinct incident links, local order
  std::vector<EndTag> tags;        // tag per entry of `links`
  std::vector<IndexMap> factors;   // per-link action

  /// Dense local matrix, links[0] fastest.
  CMatrix local_matrix() const;
  /// Local permutation as an index map over the d^k local space.
  IndexMap local_map(std::size_t local_dim) const;
};

GaussOperator gauss_operator(const LatticeGeometry& geom, std::size_t vertex, Element g,
                             const FiniteGroup& group);

/// Theta_{g,v} on the full space, in gather form.
Permutation gauss_permutation(const LatticeGeometry& geom, std::size_t vertex, Element g,
                              const FiniteGroup& group);

/// Precomputed full-space Gauss permutations for every (vertex, element).
class GaugeActions {
 public:
  GaugeActions(const LatticeGeometry& geom, const FiniteGroup& group);

  std::size_t n_vertices() const { return perms_.size(); }
  std::size_t group_order() const { return order_; }
  const Permutation& at(std::size_t vertex, Element g) const { return perms_[vertex][g]; }

  /// (1/|G|) sum_g Theta_{g,v} psi
  void vertex_average(const QuditState& in, std::size_t vertex, QuditState& out) const;
  /// Pi_s psi as the ordered product of vertex averages (sum over all |G|^V products).
  QuditState project(const QuditState& state) const;

 private:
  std::size_t order_;
  std::vector<std::vector<Permutation>> perms_;
};

/// <psi|Pi_s|psi>
double symmetric_weight(const QuditState& state, const GaugeActions& actions);
double symmetric_weight(const QuditState& state, const LatticeGeometry& geom,
                        const FiniteGroup& group);

/// Re <psi| O Pi_s |psi> for a diagonal observable O.
double symmetric_numerator(const QuditState& state, const GaugeActions& actions,
                           std::span<const double> observable);
double symmetric_numerator(const QuditState& state, const LatticeGeometry& geom,
                           const FiniteGroup& group, std::span<const double> observable);

struct PhysicalDimension {
  std::size_t character_formula = 0;  // sum_C (|G|/|C|)^(L-V)
  std::size_t fixed_point_trace = 0;  // Tr Pi_s by fixed-point counting
};

/// Both counts of the gauge-invariant sector; throws std::logic_error if they differ.
PhysicalDimension physical_dimension(const LatticeGeometry& geom, const FiniteGroup& group);

}  // namespace qlgt
