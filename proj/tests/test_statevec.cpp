#include <cstdlib>

#include <doctest.h>

#include "oracles.hpp"
#include "qlgt/group.hpp"
#include "qlgt/statevec.hpp"

using namespace qlgt;

namespace {

QuditState random_state(std::size_t sites, std::size_t d, unsigned seed) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < sites; ++i) dim *= d;
  return QuditState(sites, d, oracle::random_state(dim, seed));
}

CMatrix random_unitary(std::size_t d, unsigned seed) {
  std::srand(seed);
  const CMatrix a = CMatrix::Random(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ() * CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

}  // namespace

TEST_CASE("basis convention: site 0 fastest") {
  QuditState s(3, 6);
  CHECK(s.size() == 216);
  CHECK(s.stride(0) == 1);
  CHECK(s.stride(2) == 36);
  CHECK(s.digit(1 + 6 * 4 + 36 * 5, 1) == 4);
  CHECK(s.digit(1 + 6 * 4 + 36 * 5, 2) == 5);
}

TEST_CASE("link unitary matches the dense Kronecker oracle") {
  const QuditState psi = random_state(3, 6, 1);
  const CMatrix u = random_unitary(6, 2);
  for (std::size_t link = 0; link < 3; ++link) {
    QuditState s = psi;
    apply_link_unitary(s, link, u);
    std::vector<oracle::Mat> ops(3, oracle::id6());
    ops[link] = u;
    const CVector expect = oracle::kron_links(ops) * psi.amplitudes();
    CHECK((s.amplitudes() - expect).norm() < 1e-12);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("identity is bit-exact and M twice equals M squared") {
  const QuditState psi = random_state(2, 6, 3);
  QuditState a = psi;
  apply_link_unitary(a, 1, CMatrix::Identity(6, 6));
  CHECK(a.amplitudes() == psi.amplitudes());
  const CMatrix u = random_unitary(6, 4);
  QuditState b = psi, c = psi;
  apply_link_unitary(b, 0, u);
  apply_link_unitary(b, 0, u);
  apply_link_unitary(c, 0, u * u);
  CHECK((b.amplitudes() - c.amplitudes()).norm() < 1e-12);
}

TEST_CASE("left multiplication on every link fixes the uniform superposition") {
  const FiniteGroup g = build_d3();
  QuditState s(4, 6);
  s.amplitudes().setConstant(1.0 / 36.0);
  const CVector before = s.amplitudes();
  for (std::size_t l = 0; l < 4; ++l) apply_link_unitary(s, l, left_mult_operator(g, 4));
  CHECK((s.amplitudes() - before).norm() < 1e-14);
}

TEST_CASE("norm drift over many unitary applications") {
  QuditState s = random_state(3, 6, 5);
  const CMatrix u = random_unitary(6, 6);
  for (int i = 0; i < 200; ++i) apply_link_unitary(s, static_cast<std::size_t>(i % 3), u);
  CHECK(std::abs(s.norm() - 1.0) < 1e-9);
}

TEST_CASE("link-local operators on disjoint links commute") {
  const QuditState psi = random_state(3, 6, 7);
  const CMatrix u = random_unitary(6, 8), v = random_unitary(6, 9);
  QuditState a = psi, b = psi;
  apply_link_unitary(a, 0, u);
  apply_link_unitary(a, 2, v);
  apply_link_unitary(b, 2, v);
  apply_link_unitary(b, 0, u);
  CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-14);
}

TEST_CASE("multilink operator agrees with dense application") {
  const QuditState psi = random_state(2, 6, 10);
  const CMatrix m = random_unitary(36, 11);
  QuditState s = psi;
  const std::size_t links[] = {0, 1};
  apply_multilink_operator(s, links, m, false);
  CHECK((s.amplitudes() - m * psi.amplitudes()).norm() < 1e-12);

  // Declared order (1, 0) with the correspondingly permuted matrix.
  CMatrix swap = CMatrix::Zero(36, 36);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) swap(b + 6 * a, a + 6 * b) = 1.0;
  }
  QuditState t = psi;
  const std::size_t rev[] = {1, 0};
  apply_multilink_operator(t, rev, swap * m * swap, false);
  CHECK((t.amplitudes() - s.amplitudes()).norm() < 1e-12);
}

TEST_CASE("multilink projector is idempotent and zero norm throws") {
  const QuditState psi = random_state(3, 6, 12);
  CMatrix p = CMatrix::Zero(6, 6);
  p(0, 0) = p(2, 2) = 1.0;
  const CMatrix pp = oracle::kron_links({p, p});
  const std::size_t links[] = {0, 2};
  QuditState s = psi;
  const double n = apply_multilink_operator(s, links, pp, true);
  CHECK(n > 0.0);
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  const CVector once = s.amplitudes();
  apply_multilink_operator(s, links, pp, true);
  CHECK((s.amplitudes() - once).norm() < 1e-12);

  QuditState z(2, 6);
  z[0] = 1.0;
  CMatrix kill = CMatrix::Identity(36, 36);
  kill(0, 0) = 0.0;
  const std::size_t both[] = {0, 1};
  CHECK_THROWS_AS(apply_multilink_operator(z, both, kill, true), std::domain_error);
}

TEST_CASE("diagonal phases") {
  const QuditState psi = random_state(2, 6, 13);
  QuditState s = psi;
  apply_diagonal_phase(s, [](std::size_t) { return 0.0; });
  CHECK(s.amplitudes() == psi.amplitudes());
  std::vector<double> a(36), b(36), ab(36), obs(36);
  for (std::size_t i = 0; i < 36; ++i) {
    a[i] = 0.1 * static_cast<double>(i);
    b[i] = std::sin(static_cast<double>(i));
    ab[i] = a[i] + b[i];
    obs[i] = std::cos(static_cast<double>(i));
  }
  QuditState x = psi, y = psi;
  apply_diagonal_phase(x, a);
  apply_diagonal_phase(x, b);
  apply_diagonal_phase(y, ab);
  CHECK((x.amplitudes() - y.amplitudes()).norm() < 1e-12);
  CHECK(std::abs(x[5] - psi[5] * std::polar(1.0, -ab[5])) < 1e-14);
  QuditState c = psi;
  apply_diagonal_phase(c, [](std::size_t) { return 0.7; });
  CHECK(std::abs(expectation_diagonal(c, obs) - expectation_diagonal(psi, obs)) < 1e-12);
  CHECK(std::abs(c.norm() - 1.0) < 1e-12);
}

TEST_CASE("expectations and overlaps") {
  const QuditState psi = random_state(2, 6, 14);
  CHECK(std::abs(expectation_diagonal(psi, [](std::size_t) { return 1.0; }) - 1.0) < 1e-12);
  CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);
  const CMatrix u = random_unitary(6, 15);
  const std::size_t link[] = {1};
  std::vector<oracle::Mat> ops{oracle::id6(), u};
  const Complex expect = psi.amplitudes().dot(oracle::kron_links(ops) * psi.amplitudes());
  CHECK(std::abs(overlap_after_operator(psi, link, u) - expect) < 1e-12);

  Permutation perm;
  for (std::uint32_t i = 0; i < 36; ++i) perm.source.push_back((i + 7) % 36);
  QuditState moved(2, 6);
  apply_permutation(psi, perm, moved);
  for (std::size_t i = 0; i < 36; ++i) CHECK(moved[i] == psi[(i + 7) % 36]);
  CHECK(std::abs(overlap_after_permutation(psi, perm) - inner(psi, moved)) < 1e-14);
}

TEST_CASE("dense embedding guard") {
  const std::size_t link[] = {0};
  CHECK(embed_operator(2, 6, link, CMatrix::Identity(6, 6)).rows() == 36);
  CHECK_THROWS_AS(embed_operator(6, 6, link, CMatrix::Identity(6, 6)), std::length_error);
  CHECK_THROWS_AS(require_dense_allowed(46656, "test"), std::length_error);
  CHECK_NOTHROW(require_dense_allowed(1296, "test"));
}

TEST_CASE("state json dump") {
  QuditState s(1, 2);
  s[1] = Complex(0.0, 1.0);
  const std::string text = state_to_json_text(s);
  CHECK(text.find("\"sites\"") != std::string::npos);
  CHECK(text.find("amplitudes") != std::string::npos);
}
