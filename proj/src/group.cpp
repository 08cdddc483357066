#include "qlgt/group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlgt {

namespace {

void validate_table(const std::vector<std::vector<Element>>& mult) {
  const std::size_t n = mult.size();
  if (n == 0) throw std::invalid_argument("group: empty multiplication table");
  for (const auto& row : mult) {
    if (row.size() != n) throw std::invalid_argument("group: table is not square");
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<bool> row_seen(n, false), col_seen(n, false);
    for (std::size_t b = 0; b < n; ++b) {
      const Element r = mult[a][b];
      const Element c = mult[b][a];
      if (r >= n || c >= n || row_seen[r] || col_seen[c]) {
        throw std::invalid_argument("group: table is not a Latin square");
      }
      row_seen[r] = col_seen[c] = true;
    }
  }
  for (std::size_t g = 0; g < n; ++g) {
    if (mult[0][g] != g || mult[g][0] != g) {
      throw std::invalid_argument("group: element 0 is not the identity");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]]) {
          throw std::invalid_argument("group: table is not associative");
        }
      }
    }
  }
}

void validate_irreps(const std::vector<std::vector<Element>>& mult,
                     std::vector<Irrep>& irreps) {
  const std::size_t n = mult.size();
  std::size_t dim_sq = 0;
  for (auto& rep : irreps) {
    if (rep.matrices.size() != n) {
      throw std::invalid_argument("irrep " + rep.label + ": wrong matrix count");
    }
    for (const auto& m : rep.matrices) {
      if (m.rows() != static_cast<Eigen::Index>(rep.dim) || m.cols() != m.rows()) {
        throw std::invalid_argument("irrep " + rep.label + ": wrong matrix shape");
      }
      const CMatrix id = CMatrix::Identity(m.rows(), m.cols());
      if ((m.adjoint() * m - id).norm() > kAlgebraTol) {
        throw std::invalid_argument("irrep " + rep.label + ": matrix not unitary");
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const CMatrix prod = rep.matrices[a] * rep.matrices[b];
        if ((prod - rep.matrices[mult[a][b]]).norm() > kAlgebraTol) {
          throw std::invalid_argument("irrep " + rep.label + ": not a homomorphism");
        }
      }
    }
    rep.characters.resize(n);
    for (std::size_t g = 0; g < n; ++g) rep.characters[g] = rep.matrices[g].trace();
    dim_sq += rep.dim * rep.dim;
  }
  if (dim_sq != n) {
    throw std::invalid_argument("group: sum of irrep dim^2 does not equal the order");
  }
}

}  // namespace

FiniteGroup::FiniteGroup(std::string name, std::vector<std::vector<Element>> mult,
                         std::vector<Irrep> irreps)
    : name_(std::move(name)), mult_(std::move(mult)), irreps_(std::move(irreps)) {
  validate_table(mult_);
  validate_irreps(mult_, irreps_);
  const std::size_t n = mult_.size();

  inv_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (mult_[a][b] == identity()) inv_[a] = b;
    }
  }

  class_of_.assign(n, n);
  for (std::size_t g = 0; g < n; ++g) {
    if (class_of_[g] != n) continue;
    std::vector<Element> cls;
    for (std::size_t h = 0; h < n; ++h) {
      const Element conj = mult_[mult_[h][g]][inv_[h]];
      if (std::find(cls.begin(), cls.end(), conj) == cls.end()) cls.push_back(conj);
    }
    std::sort(cls.begin(), cls.end());
    for (Element c : cls) class_of_[c] = classes_.size();
    classes_.push_back(std::move(cls));
  }
}

std::size_t FiniteGroup::element_order(Element g) const {
  std::size_t k = 1;
  Element x = g;
  while (x != identity()) {
    x = mult_[x][g];
    ++k;
  }
  return k;
}

const Irrep& FiniteGroup::irrep(std::string_view label) const {
  return irreps_[irrep_index(label)];
}

std::size_t FiniteGroup::irrep_index(std::string_view label) const {
  for (std::size_t i = 0; i < irreps_.size(); ++i) {
    if (irreps_[i].label == label) return i;
  }
  throw std::invalid_argument("group " + name_ + ": no irrep labelled " +
                              std::string(label));
}

const Irrep& FiniteGroup::faithful_irrep() const {
  for (const auto& rep : irreps_) {
    bool injective = true;
    for (std::size_t a = 0; a < order() && injective; ++a) {
      for (std::size_t b = a + 1; b < order() && injective; ++b) {
        if ((rep.matrices[a] - rep.matrices[b]).norm() < kAlgebraTol) injective = false;
      }
    }
    if (injective) return rep;
  }
  throw std::logic_error("group " + name_ + " has no faithful irrep");
}

FiniteGroup build_d3() {
  constexpr std::size_t n = 6;
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  CMatrix s(2, 2), r(2, 2);
  s << 0, 1, 1, 0;
  r << w, 0, 0, std::conj(w);

  std::vector<CMatrix> tau(n);
  for (std::size_t g = 0; g < n; ++g) {
    CMatrix m = CMatrix::Identity(2, 2);
    if (g / 3 == 1) m = s;
    for (std::size_t k = 0; k < g % 3; ++k) m = m * r;
    tau[g] = m;
  }

  std::vector<std::vector<Element>> mult(n, std::vector<Element>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const CMatrix prod = tau[a] * tau[b];
      std::size_t match = n;
      for (std::size_t c = 0; c < n; ++c) {
        if ((prod - tau[c]).norm() < kAlgebraTol) match = c;
      }
      if (match == n) throw std::logic_error("build_d3: product matches no element");
      mult[a][b] = match;
    }
  }

  Irrep trivial{"e", 1, {}, {}};
  Irrep parity{"p", 1, {}, {}};
  for (std::size_t g = 0; g < n; ++g) {
    trivial.matrices.push_back(CMatrix::Identity(1, 1));
    parity.matrices.push_back(CMatrix::Constant(1, 1, g < 3 ? 1.0 : -1.0));
  }
  Irrep faithful{"tau", 2, tau, {}};
  return FiniteGroup("D3", std::move(mult), {trivial, parity, faithful});
}

FiniteGroup cyclic_group(std::size_t n) {
  if (n < 2) throw std::invalid_argument("cyclic_group: n must be >= 2");
  std::vector<std::vector<Element>> mult(n, std::vector<Element>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) mult[a][b] = (a + b) % n;
  }
  std::vector<Irrep> irreps;
  for (std::size_t k = 0; k < n; ++k) {
    Irrep rep{std::to_string(k), 1, {}, {}};
    for (std::size_t a = 0; a < n; ++a) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * a) % n) /
                           static_cast<double>(n);
      rep.matrices.push_back(CMatrix::Constant(1, 1, std::polar(1.0, phase)));
    }
    irreps.push_back(std::move(rep));
  }
  return FiniteGroup("Z" + std::to_string(n), std::move(mult), std::move(irreps));
}

CMatrix fourier_matrix(const FiniteGroup& group) {
  const auto n = static_cast<Eigen::Index>(group.order());
  CMatrix f(n, n);
  Eigen::Index col = 0;
  for (const auto& rep : group.irreps()) {
    const double scale = std::sqrt(static_cast<double>(rep.dim) / static_cast<double>(n));
    for (std::size_t m = 0; m < rep.dim; ++m) {
      for (std::size_t k = 0; k < rep.dim; ++k, ++col) {
        for (Eigen::Index g = 0; g < n; ++g) {
          f(g, col) = scale * rep.matrices[g](m, k);
        }
      }
    }
  }
  const double dev = (f.adjoint() * f - CMatrix::Identity(n, n)).norm();
  if (dev > kOperatorTol) {
    throw std::logic_error("fourier_matrix: result not unitary (deviation " +
                           std::to_string(dev) + "); irrep set is incomplete");
  }
  return f;
}

std::vector<std::size_t> fourier_column_irreps(const FiniteGroup& group) {
  std::vector<std::size_t> labels;
  for (std::size_t j = 0; j < group.irreps().size(); ++j) {
    const std::size_t d = group.irreps()[j].dim;
    labels.insert(labels.end(), d * d, j);
  }
  return labels;
}

IndexMap left_mult_map(const FiniteGroup& group, Element h) {
  IndexMap map(group.order());
  for (Element g = 0; g < group.order(); ++g) map[g] = group.multiply(h, g);
  return map;
}

IndexMap right_mult_map(const FiniteGroup& group, Element h) {
  IndexMap map(group.order());
  const Element h_inv = group.inverse(h);
  for (Element g = 0; g < group.order(); ++g) map[g] = group.multiply(g, h_inv);
  return map;
}

CMatrix permutation_matrix(const IndexMap& map) {
  const auto n = static_cast<Eigen::Index>(map.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) m(static_cast<Eigen::Index>(map[x]), x) = 1.0;
  return m;
}

CMatrix left_mult_operator(const FiniteGroup& group, Element h) {
  return permutation_matrix(left_mult_map(group, h));
}

CMatrix right_mult_operator(const FiniteGroup& group, Element h) {
  return permutation_matrix(right_mult_map(group, h));
}

std::vector<CVector> connection_diagonals(const FiniteGroup& group,
                                          std::string_view irrep_label) {
  const Irrep& rep = group.irrep(irrep_label);
  const auto n = static_cast<Eigen::Index>(group.order());
  std::vector<CVector> out;
  for (std::size_t m = 0; m < rep.dim; ++m) {
    for (std::size_t k = 0; k < rep.dim; ++k) {
      CVector diag(n);
      for (Eigen::Index g = 0; g < n; ++g) diag(g) = rep.matrices[g](m, k);
      out.push_back(std::move(diag));
    }
  }
  return out;
}

}  // namespace qlgt
