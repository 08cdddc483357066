#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qlgt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Index into the group tables. Index 0 is always the identity.
using Element = std::size_t;

/// A single-register index map: `map[x]` is the image of basis state |x>.
using IndexMap = std::vector<std::size_t>;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kOperatorTol = 1e-10;

struct Irrep {
  std::string label;
  std::size_t dim = 1;
  std::vector<CMatrix> matrices;    // D(g), one per element
  std::vector<Complex> characters;  // Tr D(g)
};

/// Finite group given by its multiplication table and a complete set of
/// irreducible representations. Immutable after construction.
///
/// The constructor validates the table (Latin square, identity at index 0)
/// and every irrep (unitary, homomorphism, sum of dim^2 equals the order).
/// Inverses and conjugacy classes are derived from the table.
class FiniteGroup {
 public:
  FiniteGroup(std::string name, std::vector<std::vector<Element>> mult,
              std::vector<Irrep> irreps);

  const std::string& name() const { return name_; }
  std::size_t order() const { return mult_.size(); }
  static constexpr Element identity() { return 0; }

  Element multiply(Element a, Element b) const { return mult_[a][b]; }
  Element inverse(Element a) const { return inv_[a]; }
  bool commute(Element a, Element b) const {
    return mult_[a][b] == mult_[b][a];
  }
  /// Smallest k > 0 with g^k = e.
  std::size_t element_order(Element g) const;

  const std::vector<std::vector<Element>>& mult_table() const { return mult_; }
  const std::vector<std::vector<Element>>& classes() const { return classes_; }
  std::size_t class_of(Element g) const { return class_of_[g]; }

  const std::vector<Irrep>& irreps() const { return irreps_; }
  const Irrep& irrep(std::string_view label) const;
  std::size_t irrep_index(std::string_view label) const;
  /// First irrep whose matrices are pairwise distinct.
  const Irrep& faithful_irrep() const;

 private:
  std::string name_;
  std::vector<std::vector<Element>> mult_;
  std::vector<Element> inv_;
  std::vector<std::vector<Element>> classes_;
  std::vector<std::size_t> class_of_;
  std::vector<Irrep> irreps_;
};

/// Dihedral group of the triangle with the encoding g = s^floor(g/3) r^(g mod 3):
/// 0 is the identity, 1-2 rotations, 3-5 reflections. Irreps are ordered
/// (e, p, tau); tau is generated by D(s) = [[0,1],[1,0]] and
/// D(r) = diag(w, w*), w = exp(2 pi i/3).
FiniteGroup build_d3();

/// Cyclic group Z_n with its n one-dimensional irreps chi_k(a) = exp(2 pi i k a/n).
FiniteGroup cyclic_group(std::size_t n);

/// Group Fourier transform F[g, (j,m,n)] = sqrt(dim j / |G|) D^j_mn(g).
/// Columns follow the irrep order of the group, then row-major (m, n).
CMatrix fourier_matrix(const FiniteGroup& group);

/// Irrep label of every Fourier column, in column order.
std::vector<std::size_t> fourier_column_irreps(const FiniteGroup& group);

/// Theta^L_h |g> = |h g>
IndexMap left_mult_map(const FiniteGroup& group, Element h);
/// Theta^R_h |g> = |g h^-1>
IndexMap right_mult_map(const FiniteGroup& group, Element h);

CMatrix left_mult_operator(const FiniteGroup& group, Element h);
CMatrix right_mult_operator(const FiniteGroup& group, Element h);

/// 0/1 matrix with M(map[x], x) = 1.
CMatrix permutation_matrix(const IndexMap& map);

/// Diagonals of the connection U^j_mn, ordered m * dim + n; entry g is D^j_mn(g).
std::vector<CVector> connection_diagonals(const FiniteGroup& group,
                                          std::string_view irrep_label);

// JSON group definitions: {"name", "order", "mult", "irreps": [{"label",
// "dim", "matrices": [element][row][col] as [re, im]}]}.
FiniteGroup load_group_json(const std::string& path);
FiniteGroup group_from_json_text(const std::string& text);
std::string group_to_json_text(const FiniteGroup& group);

}  // namespace qlgt
