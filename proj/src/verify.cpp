#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qlgt/compile.hpp"
#include "qlgt/experiment.hpp"
#include "qlgt/mitigate.hpp"

namespace qlgt {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string counts_text(const std::vector<std::size_t>& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  return os.str();
}

CheckResult check_dimension(std::size_t n, std::size_t expected) {
  CheckResult r;
  r.name = "physical_dimension_n" + std::to_string(n);
  try {
    const auto d = physical_dimension(ladder_geometry(n), build_d3());
    r.pass = d.character_formula == expected && d.fixed_point_trace == expected;
    r.detail = "character=" + std::to_string(d.character_formula) +
               " trace=" + std::to_string(d.fixed_point_trace) +
               " expected=" + std::to_string(expected);
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

// Eigenvalue multisets of the single-link factors at vertex 0 of the n=2 ladder.
CheckResult check_spectra() {
  const FiniteGroup g = build_d3();
  struct Case {
    EndTag tag;
    Element element;
    std::vector<std::size_t> expected;
  };
  const Case cases[] = {
      {EndTag::L, 3, {3, 3}},     {EndTag::R, 3, {3, 3}},     {EndTag::LR, 3, {4, 2}},
      {EndTag::L, 1, {2, 2, 2}},  {EndTag::R, 1, {2, 2, 2}},  {EndTag::LR, 1, {4, 1, 1}},
  };
  CheckResult r;
  r.name = "link_factor_spectra";
  r.pass = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    const IndexMap map = link_factor_map(g, c.tag, c.element);
    const auto counts = permutation_phase_counts(map, g.element_order(c.element));
    // Numerical cross-check of the cycle count.
    Eigen::ComplexEigenSolver<CMatrix> eig(permutation_matrix(map));
    std::vector<std::size_t> numeric(counts.size(), 0);
    const double ord = static_cast<double>(counts.size());
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      const double k = std::arg(eig.eigenvalues()[i]) * ord / (2.0 * std::numbers::pi);
      const auto idx = static_cast<std::size_t>(std::lround(k + ord)) % counts.size();
      if (std::abs(std::abs(eig.eigenvalues()[i]) - 1.0) < 1e-10) ++numeric[idx];
    }
    const bool ok = counts == c.expected && numeric == c.expected;
    r.pass = r.pass && ok;
    os << (c.tag == EndTag::L ? "L" : c.tag == EndTag::R ? "R" : "LR") << "(g" << c.element
       << ")=[" << counts_text(counts) << "] ";
  }
  r.detail = os.str();
  return r;
}

CheckResult check_fourier() {
  CheckResult r;
  r.name = "fourier_unitarity";
  try {
    const CMatrix f = fourier_matrix(build_d3());
    const double err = (f.adjoint() * f - CMatrix::Identity(f.rows(), f.cols())).norm();
    r.pass = err < kOperatorTol;
    r.detail = "||F^dag F - 1|| = " + sci(err);
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

CheckResult check_commutators() {
  const FiniteGroup g = build_d3();
  const LatticeGeometry geom = ladder_geometry(2);
  const auto h_b = magnetic_phase_table(geom, {0.5}, g, "tau");
  const CMatrix h_e = electric_link_hamiltonian({0.5}, g, "tau");
  const GaugeActions actions(geom, g);
  CheckResult r;
  r.name = "gauss_law_commutators";
  double worst_hb = 0.0, worst_he = 0.0;
  bool vertices_commute = true;
  for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
    for (Element x = 1; x < g.order(); ++x) {
      const auto& src = actions.at(v, x).source;
      for (std::size_t i = 0; i < h_b.size(); ++i) worst_hb = std::max(worst_hb, std::abs(h_b[i] - h_b[src[i]]));
      const GaussOperator op = gauss_operator(geom, v, x, g);
      for (const auto& f : op.factors) {
        const CMatrix p = permutation_matrix(f);
        worst_he = std::max(worst_he, (p * h_e - h_e * p).norm());
      }
      for (std::size_t w = v + 1; w < geom.n_vertices(); ++w) {
        for (Element y = 1; y < g.order(); ++y) {
          std::vector<Element> a(geom.n_vertices(), 0), b(geom.n_vertices(), 0);
          a[v] = x;
          b[w] = y;
          vertices_commute = vertices_commute && gauge_products_commute(geom, g, a, b);
        }
      }
    }
  }
  r.pass = worst_hb < kOperatorTol && worst_he < kOperatorTol && vertices_commute;
  r.detail = "max|[Theta,H_B]|=" + sci(worst_hb) +
             " max|[Theta,H_E]|=" + sci(worst_he) +
             " distinct_vertices_commute=" + (vertices_commute ? "true" : "false");
  return r;
}

std::vector<CheckResult> check_compile() {
  const FiniteGroup g = build_d3();
  const LatticeGeometry geom = ladder_geometry(2);
  const CouplingParams c{0.5};
  const double dt = 0.25;
  std::vector<CheckResult> out;

  {
    CheckResult r;
    r.name = "compile_electric_equivalence";
    const CMatrix h = electric_link_hamiltonian(c, g, "tau");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    CVector ph(eig.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, -eig.eigenvalues()[i] * dt);
    const CMatrix exact = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
    const CMatrix u = sequence_unitary(compile_electric_step(g, c, dt, 0), RegisterSpec{{g.order()}}, g);
    const double err = (u - exact).operatorNorm();
    r.pass = err < kOperatorTol;
    r.detail = "operator norm distance " + sci(err);
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "compile_plaquette_equivalence";
    const RegisterSpec spec = RegisterSpec::links(geom, g);
    double worst = 0.0;
    std::size_t perms = 0;
    for (std::size_t p = 0; p < geom.plaquettes.size(); ++p) {
      const GateSequence seq = compile_plaquette_step(geom, g, c, dt, p);
      const CMatrix u = sequence_unitary(seq, spec, g);
      const auto tr = plaquette_trace_table(geom, g, p, "tau");
      CVector d(static_cast<Eigen::Index>(tr.size()));
      for (std::size_t i = 0; i < tr.size(); ++i) d[static_cast<Eigen::Index>(i)] = std::polar(1.0, dt * c.inv_g2 * tr[i]);
      CMatrix diff = u;
      diff.diagonal() -= d;
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      perms = resource_report(seq).control_permutations;
    }
    r.pass = worst < kOperatorTol;
    r.detail = "max entry deviation " + sci(worst) +
               " ctrl_perms_per_plaquette=" + std::to_string(perms);
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "compile_dps_check_equivalence";
    double worst = 0.0;
    for (std::size_t v = 0; v < geom.n_vertices(); ++v) {
      for (Element x = 1; x < g.order(); ++x) {
        const auto chk = compile_dps_check(geom, g, v, x);
        const GaussOperator op = gauss_operator(geom, v, x, g);
        std::vector<std::size_t> regs = op.links;
        regs.push_back(chk.ancilla_register);
        RegisterSpec spec;
        spec.dims.assign(op.links.size(), g.order());
        spec.dims.push_back(chk.ancilla_dim);
        const CMatrix u = sequence_unitary(remap_registers(chk.sequence, regs), spec, g);
        const auto proj = local_spectral_projectors(geom, g, v, x);
        const auto loc = static_cast<Eigen::Index>(proj.front().rows());
        for (std::size_t k = 0; k < chk.ancilla_dim; ++k) {
          const CMatrix block = u.block(static_cast<Eigen::Index>(k) * loc, 0, loc, loc);
          worst = std::max(worst, (block - proj[k]).operatorNorm());
        }
      }
    }
    r.pass = worst < kOperatorTol;
    r.detail = "max operator norm distance " + sci(worst);
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "control_permutation_counts";
    const std::size_t step = resource_report(compile_trotter_step(geom, g, c, dt)).control_permutations;
    const std::size_t plaq = resource_report(compile_plaquette_step(geom, g, c, dt, 0)).control_permutations;
    const std::size_t refl = resource_report(compile_dps_check(geom, g, 0, 3).sequence).control_permutations;
    const std::size_t rot = resource_report(compile_dps_check(geom, g, 0, 1).sequence).control_permutations;
    r.pass = plaq == 30 && step == 60 && refl == 8 && rot == 10;
    r.detail = "plaquette=" + std::to_string(plaq) + " step=" + std::to_string(step) +
               " reflection_check=" + std::to_string(refl) +
               " rotation_check=" + std::to_string(rot);
    out.push_back(r);
  }
  return out;
}

CheckResult check_cliques() {
  const FiniteGroup g = build_d3();
  const LatticeGeometry geom = ladder_geometry(2);
  const CliqueCover cover = commutation_cliques(geom, g);
  const std::vector<std::vector<Element>> expected{{0, 1, 2}, {3}, {4}, {5}};
  bool classes_ok = true;
  for (const auto& cls : cover.vertex_classes) classes_ok = classes_ok && cls == expected;
  std::size_t nodes = 0;
  for (const auto& q : cover.cliques) nodes += q.size();
  CheckResult r;
  r.name = "clique_cover";
  r.pass = classes_ok && cover.cliques.size() <= 16 && nodes == 36;
  r.detail = "cliques=" + std::to_string(cover.cliques.size()) + " nodes=" + std::to_string(nodes) +
             " vertex_classes_match=" + (classes_ok ? "true" : "false");
  return r;
}

}  // namespace

std::vector<CheckResult> run_verify() {
  std::vector<CheckResult> out;
  out.push_back(check_dimension(2, 49));
  out.push_back(check_dimension(3, 251));
  out.push_back(check_spectra());
  out.push_back(check_fourier());
  out.push_back(check_commutators());
  for (auto& r : check_compile()) out.push_back(std::move(r));
  out.push_back(check_cliques());
  return out;
}

std::string checks_to_json_text(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& c : checks) {
    doc.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    all = all && c.pass;
  }
  nlohmann::ordered_json top;
  top["all_pass"] = all;
  top["checks"] = doc;
  return top.dump(2) + "\n";
}

}  // namespace qlgt
