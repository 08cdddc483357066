#include "qlgt/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlgt {

LatticeGeometry ladder_geometry(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ladder_geometry: need at least 2 plaquettes");
  LatticeGeometry geom;
  geom.n_plaquettes = n;
  for (std::size_t i = 0; i < n; ++i) geom.links.push_back({i, (i + 1) % n, false});
  for (std::size_t i = 0; i < n; ++i) geom.links.push_back({i, i, true});

  geom.vertices.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto& ends = geom.vertices[v].ends;
    ends.push_back({v, EndTag::L});
    ends.push_back({(v + n - 1) % n, EndTag::R});
    ends.push_back({n + v, EndTag::LR});
    std::sort(ends.begin(), ends.end(),
              [](const LinkEnd& a, const LinkEnd& b) { return a.link < b.link; });
  }
  for (std::size_t i = 0; i < n; ++i) {
    geom.plaquettes.push_back(Plaquette{{PlaquetteFactor{i, false},
                                         PlaquetteFactor{n + (i + 1) % n, false},
                                         PlaquetteFactor{i, true},
                                         PlaquetteFactor{n + i, true}}});
  }
  return geom;
}

namespace {

std::size_t config_count(const LatticeGeometry& geom, const FiniteGroup& group) {
  std::size_t dim = 1;
  for (std::size_t l = 0; l < geom.n_links(); ++l) dim *= group.order();
  return dim;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

std::vector<double> plaquette_trace_table(const LatticeGeometry& geom, const FiniteGroup& group,
                                          std::size_t plaquette, std::string_view irrep_label) {
  if (plaquette >= geom.plaquettes.size()) {
    throw std::out_of_range("plaquette index " + std::to_string(plaquette) + " out of range");
  }
  const Irrep& rep = group.irrep(irrep_label);
  const std::size_t d = group.order();
  const std::size_t dim = config_count(geom, group);
  std::vector<CMatrix> adj(d);
  for (std::size_t g = 0; g < d; ++g) adj[g] = rep.matrices[g].adjoint();

  const Plaquette& p = geom.plaquettes[plaquette];
  std::vector<std::size_t> strides(geom.n_links(), 1);
  for (std::size_t l = 1; l < geom.n_links(); ++l) strides[l] = strides[l - 1] * d;

  std::vector<double> table(dim);
  CMatrix prod(rep.dim, rep.dim);
  for (std::size_t i = 0; i < dim; ++i) {
    prod.setIdentity();
    for (const auto& f : p.factors) {
      const std::size_t g = (i / strides[f.link]) % d;
      prod = prod * (f.dagger ? adj[g] : rep.matrices[g]);
    }
    table[i] = prod.trace().real();
  }
  return table;
}

std::vector<double> magnetic_phase_table(const LatticeGeometry& geom,
                                         const CouplingParams& coupling,
                                         const FiniteGroup& group,
                                         std::string_view irrep_label) {
  std::vector<double> table(config_count(geom, group), 0.0);
  for (std::size_t p = 0; p < geom.plaquettes.size(); ++p) {
    const auto tr = plaquette_trace_table(geom, group, p, irrep_label);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] -= coupling.inv_g2 * tr[i];
  }
  return table;
}

CMatrix transfer_matrix(const CouplingParams& coupling, const FiniteGroup& group,
                        std::string_view irrep_label) {
  if (!(coupling.inv_g2 > 0.0)) throw std::invalid_argument("transfer_matrix: 1/g^2 must be > 0");
  const Irrep& rep = group.irrep(irrep_label);
  const auto n = static_cast<Eigen::Index>(group.order());
  CMatrix k(n, n);
  for (Eigen::Index gp = 0; gp < n; ++gp) {
    for (Eigen::Index g = 0; g < n; ++g) {
      const Element h = group.multiply(group.inverse(gp), g);
      k(gp, g) = std::exp(coupling.inv_g2 * rep.characters[h].real());
    }
  }
  return k;
}

std::vector<double> electric_irrep_energies(const CouplingParams& coupling,
                                            const FiniteGroup& group,
                                            std::string_view irrep_label) {
  if (!(coupling.inv_g2 > 0.0)) {
    throw std::invalid_argument("electric_irrep_energies: 1/g^2 must be > 0");
  }
  const Irrep& rep = group.irrep(irrep_label);
  std::vector<double> eps;
  for (const auto& j : group.irreps()) {
    Complex sum = 0.0;
    for (Element h = 0; h < group.order(); ++h) {
      sum += std::exp(coupling.inv_g2 * rep.characters[h].real()) * j.characters[h];
    }
    const double lambda = sum.real() / static_cast<double>(j.dim);
    if (!(lambda > 0.0)) {
      throw std::domain_error("transfer eigenvalue " + std::to_string(lambda) + " for irrep " +
                              j.label + " is not positive");
    }
    eps.push_back(-std::log(lambda));
  }
  return eps;
}

CMatrix electric_link_hamiltonian(const CouplingParams& coupling, const FiniteGroup& group,
                                  std::string_view irrep_label) {
  const CMatrix k = transfer_matrix(coupling, group, irrep_label);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(k);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("electric_link_hamiltonian: eigendecomposition failed");
  }
  const Eigen::VectorXd lambda = solver.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0)) {
      throw std::domain_error("electric_link_hamiltonian: transfer eigenvalue " +
                              std::to_string(lambda[i]) + " is not positive at 1/g^2 = " +
                              std::to_string(coupling.inv_g2));
    }
  }

  // Each irrep eigenvalue appears with multiplicity dim(j)^2.
  std::vector<double> expected;
  const auto eps = electric_irrep_energies(coupling, group, irrep_label);
  for (std::size_t j = 0; j < eps.size(); ++j) {
    const std::size_t d = group.irreps()[j].dim;
    expected.insert(expected.end(), d * d, std::exp(-eps[j]));
  }
  std::sort(expected.begin(), expected.end());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i] - expected[static_cast<std::size_t>(i)]) >
        1e-9 * std::max(1.0, std::abs(lambda[i]))) {
      throw std::logic_error("electric_link_hamiltonian: transfer spectrum does not match "
                             "the irrep degeneracy pattern");
    }
  }

  const Eigen::VectorXd energies = -lambda.array().log();
  return solver.eigenvectors() * energies.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

std::vector<std::size_t> permutation_phase_counts(const IndexMap& map, std::size_t order) {
  std::vector<std::size_t> counts(order, 0);
  std::vector<bool> seen(map.size(), false);
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    for (std::size_t x = start; !seen[x]; x = map[x]) {
      seen[x] = true;
      ++len;
    }
    if (order % len != 0) {
      throw std::invalid_argument("permutation_phase_counts: cycle length " +
                                  std::to_string(len) + " does not divide " +
                                  std::to_string(order));
    }
    for (std::size_t m = 0; m < len; ++m) ++counts[m * (order / len)];
  }
  return counts;
}

IndexMap link_factor_map(const FiniteGroup& group, EndTag tag, Element g) {
  switch (tag) {
    case EndTag::L:
      return left_mult_map(group, g);
    case EndTag::R:
      return right_mult_map(group, g);
    case EndTag::LR: {
      const IndexMap left = left_mult_map(group, g);
      const IndexMap right = right_mult_map(group, g);
      IndexMap both(group.order());
      for (std::size_t x = 0; x < both.size(); ++x) both[x] = left[right[x]];
      return both;
    }
  }
  throw std::logic_error("link_factor_map: bad tag");
}

IndexMap GaussOperator::local_map(std::size_t local_dim) const {
  std::size_t local = 1;
  for (std::size_t k = 0; k < links.size(); ++k) local *= local_dim;
  IndexMap map(local);
  for (std::size_t loc = 0; loc < local; ++loc) {
    std::size_t rem = loc, image = 0, stride = 1;
    for (const auto& f : factors) {
      image += f[rem % local_dim] * stride;
      rem /= local_dim;
      stride *= local_dim;
    }
    map[loc] = image;
  }
  return map;
}

CMatrix GaussOperator::local_matrix() const {
  return permutation_matrix(local_map(factors.front().size()));
}

GaussOperator gauss_operator(const LatticeGeometry& geom, std::size_t vertex, Element g,
                             const FiniteGroup& group) {
  if (vertex >= geom.n_vertices()) throw std::out_of_range("gauss_operator: bad vertex");
  if (g >= group.order()) throw std::out_of_range("gauss_operator: bad element");
  GaussOperator op;
  op.vertex = vertex;
  op.element = g;
  for (const auto& end : geom.vertices[vertex].ends) {
    op.links.push_back(end.link);
    op.tags.push_back(end.tag);
    op.factors.push_back(link_factor_map(group, end.tag, g));
  }
  return op;
}

Permutation gauss_permutation(const LatticeGeometry& geom, std::size_t vertex, Element g,
                              const FiniteGroup& group) {
  const GaussOperator op = gauss_operator(geom, vertex, g, group);
  const std::size_t d = group.order();
  const std::size_t dim = config_count(geom, group);
  std::vector<std::size_t> strides(geom.n_links(), 1);
  for (std::size_t l = 1; l < geom.n_links(); ++l) strides[l] = strides[l - 1] * d;

  Permutation perm;
  perm.source.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t image = i;
    for (std::size_t k = 0; k < op.links.size(); ++k) {
      const std::size_t s = strides[op.links[k]];
      const std::size_t x = (i / s) % d;
      image = image - x * s + op.factors[k][x] * s;
    }
    perm.source[image] = static_cast<std::uint32_t>(i);
  }
  return perm;
}

GaugeActions::GaugeActions(const LatticeGeometry& geom, const FiniteGroup& group)
    : order_(group.order()) {
  perms_.resize(geom.n_vertices());
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (Element g = 0; g < group.order(); ++g) {
      perms_[v].push_back(gauss_permutation(geom, v, g, group));
    }
  }
}

void GaugeActions::vertex_average(const QuditState& in, std::size_t vertex,
                                  QuditState& out) const {
  const std::size_t dim = in.size();
  const Complex* src = in.amplitudes().data();
  Complex* dst = out.amplitudes().data();
  std::fill(dst, dst + dim, Complex(0.0));
  for (const auto& perm : perms_[vertex]) {
    const std::uint32_t* s = perm.source.data();
    for (std::size_t i = 0; i < dim; ++i) dst[i] += src[s[i]];
  }
  const double scale = 1.0 / static_cast<double>(order_);
  for (std::size_t i = 0; i < dim; ++i) dst[i] *= scale;
}

QuditState GaugeActions::project(const QuditState& state) const {
  QuditState cur = state;
  QuditState next = state;
  for (std::size_t v = 0; v < perms_.size(); ++v) {
    vertex_average(cur, v, next);
    std::swap(cur, next);
  }
  return cur;
}

double symmetric_weight(const QuditState& state, const GaugeActions& actions) {
  return inner(state, actions.project(state)).real();
}

double symmetric_weight(const QuditState& state, const LatticeGeometry& geom,
                        const FiniteGroup& group) {
  return symmetric_weight(state, GaugeActions(geom, group));
}

double symmetric_numerator(const QuditState& state, const GaugeActions& actions,
                           std::span<const double> observable) {
  if (observable.size() != state.size()) {
    throw std::invalid_argument("symmetric_numerator: observable length mismatch");
  }
  const QuditState projected = actions.project(state);
  const Complex* a = state.amplitudes().data();
  const Complex* b = projected.amplitudes().data();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) acc += std::conj(a[i]) * observable[i] * b[i];
  return acc.real();
}

double symmetric_numerator(const QuditState& state, const LatticeGeometry& geom,
                           const FiniteGroup& group, std::span<const double> observable) {
  return symmetric_numerator(state, GaugeActions(geom, group), observable);
}

PhysicalDimension physical_dimension(const LatticeGeometry& geom, const FiniteGroup& group) {
  const std::size_t n = group.order();
  const std::size_t links = geom.n_links();
  const std::size_t verts = geom.n_vertices();
  if (links < verts) throw std::logic_error("physical_dimension: fewer links than vertices");

  PhysicalDimension out;
  for (const auto& cls : group.classes()) {
    out.character_formula += ipow(n / cls.size(), links - verts);
  }

  // Tr prod_v Theta_{g_v,v} factorizes over links into fixed-point counts.
  const std::size_t tuples = ipow(n, verts);
  std::size_t total = 0;
  std::vector<Element> g(verts, 0);
  for (std::size_t t = 0; t < tuples; ++t) {
    std::size_t rem = t;
    for (std::size_t v = 0; v < verts; ++v) {
      g[v] = rem % n;
      rem /= n;
    }
    std::size_t term = 1;
    for (std::size_t l = 0; l < links && term > 0; ++l) {
      IndexMap map(n);
      for (std::size_t x = 0; x < n; ++x) map[x] = x;
      for (std::size_t v = 0; v < verts; ++v) {
        for (const auto& end : geom.vertices[v].ends) {
          if (end.link != l) continue;
          const IndexMap f = link_factor_map(group, end.tag, g[v]);
          for (auto& x : map) x = f[x];
        }
      }
      std::size_t fixed = 0;
      for (std::size_t x = 0; x < n; ++x) fixed += map[x] == x ? 1 : 0;
      term *= fixed;
    }
    total += term;
  }
  if (total % tuples != 0) {
    throw std::logic_error("physical_dimension: Tr Pi_s is not an integer");
  }
  out.fixed_point_trace = total / tuples;
  if (out.fixed_point_trace != out.character_formula) {
    throw std::logic_error("physical_dimension: character formula gives " +
                           std::to_string(out.character_formula) + " but Tr Pi_s = " +
                           std::to_string(out.fixed_point_trace));
  }
  return out;
}

}  // namespace qlgt
