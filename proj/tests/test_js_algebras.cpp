#include "oscalg/js_algebras.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace oscalg;

namespace {

constexpr RealizationName kAll[] = {RealizationName::su2_js, RealizationName::su11_pseudochiral,
                                    RealizationName::su11_pseudochiral_hermitian_map, RealizationName::su11_standard};

double diff(const OperatorMatrix& a, const OperatorMatrix& b, const ProjectedSubspace& s) {
  return residual_on_subspace(a, b, s);
}

DenseVector random_guarded_state(std::mt19937_64& rng, const ProjectedSubspace& sub) {
  std::normal_distribution<double> g;
  DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(sub.space().dimension()));
  for (std::size_t i : sub.indices()) v(static_cast<Eigen::Index>(i)) = Complex(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("pseudo-chiral ladder operators") {
  const FockSpace s(2, 10, 1.3);
  const auto m = build_pseudochiral_modes(s);
  const ProjectedSubspace k1(s, 1);
  const auto I = OperatorMatrix::identity(s);
  const auto Z = OperatorMatrix::zero(s);
  CHECK(diff(commutator(m.a, m.a_tilde), I, k1) < 1e-12);
  CHECK(diff(commutator(m.b, m.b_tilde), I, k1) < 1e-12);
  CHECK(diff(commutator(m.a, m.b_tilde), Z, k1) < 1e-12);
  CHECK(diff(commutator(m.a, m.b), Z, k1) < 1e-12);
  CHECK(diff(commutator(m.a_tilde, m.b_tilde), Z, k1) < 1e-12);
  // the g-adjoint is not the hermitian adjoint
  CHECK((m.a_tilde.matrix() - m.a.adjoint().matrix()).cwiseAbs().maxCoeff() > 0.1);
  // [x+, p+] = i on the guarded subspace, [x+, p-] = 0
  CHECK(diff(commutator(m.x_plus, m.p_plus), Complex(0, 1) * I, k1) < 1e-12);
  CHECK(diff(commutator(m.x_plus, m.p_minus), Z, k1) < 1e-12);
  CHECK_THROWS_AS(build_pseudochiral_modes(FockSpace(1, 10)), std::invalid_argument);
}

TEST_CASE("eta realizes PT on positions and momenta") {
  for (std::size_t N : {4, 10}) {
    const FockSpace s(2, N, 0.8);
    const auto eta = build_eta(s);
    const auto [x1, p1] = position_momentum(s, 0);
    const auto [x2, p2] = position_momentum(s, 1);
    CHECK((eta.conjugate(x1).matrix() - x1.matrix()).norm() < 1e-12);
    CHECK((eta.conjugate(x2).matrix() + x2.matrix()).norm() < 1e-12);
    CHECK((eta.conjugate(p1).matrix() + p1.matrix()).norm() < 1e-12);
    CHECK((eta.conjugate(p2).matrix() - p2.matrix()).norm() < 1e-12);
    // U is unitary and eta squares to one
    const auto n = static_cast<Eigen::Index>(s.dimension());
    CHECK((eta.U * eta.U.adjoint() - DenseMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK((eta.inverse_conjugate(eta.conjugate(x1 * p2)).matrix() - (x1 * p2).matrix()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(build_eta(FockSpace(3, 4)), std::invalid_argument);
}

TEST_CASE("g-adjoint") {
  const FockSpace s(2, 10, 1.1);
  const auto eta = build_eta(s);
  const auto m = build_pseudochiral_modes(s);
  const ProjectedSubspace k2(s, 2);
  CHECK((g_adjoint(OperatorMatrix::identity(s), eta).matrix() - DenseMatrix::Identity(100, 100)).norm() == 0.0);
  CHECK(diff(g_adjoint(m.a, eta), m.a_tilde, k2) < 1e-12);
  CHECK(diff(g_adjoint(m.b, eta), m.b_tilde, k2) < 1e-12);
  CHECK_THROWS_AS(g_adjoint(annihilation(FockSpace(2, 4), 0), eta), std::invalid_argument);
}

TEST_CASE("g-adjoint is an involution on random quadratic polynomials") {
  const FockSpace s(2, 8, 0.7);
  const auto eta = build_eta(s);
  const auto [x1, p1] = position_momentum(s, 0);
  const auto [x2, p2] = position_momentum(s, 1);
  const std::vector<OperatorMatrix> gens{x1, x2, p1, p2};
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (int trial = 0; trial < 25; ++trial) {
    OperatorMatrix O = Complex(g(rng), g(rng)) * OperatorMatrix::identity(s);
    for (int term = 0; term < 4; ++term) {
      O = O + Complex(g(rng), g(rng)) * gens[pick(rng)];
      O = O + Complex(g(rng), g(rng)) * (gens[pick(rng)] * gens[pick(rng)]);
    }
    CHECK((g_adjoint(g_adjoint(O, eta), eta).matrix() - O.matrix()).norm() < 1e-10);
  }
}

TEST_CASE("g-inner product") {
  const FockSpace s(2, 8, 1.0);
  const auto eta = build_eta(s);
  for (std::size_t i = 0; i < s.dimension(); i += 7) {
    const auto e = s.basis_state(s.occupations(i));
    const Complex v = g_inner_product(e, e, eta);
    CHECK(v.imag() == 0.0);
    CHECK(std::abs(v.real()) == 1.0);
  }
  // H+ is g-self-adjoint
  const auto h = pseudochiral_hamiltonians(s);
  const ProjectedSubspace k1(s, 1);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = random_guarded_state(rng, k1);
    const auto phi = random_guarded_state(rng, k1);
    const auto chi = random_guarded_state(rng, k1);
    const Complex lhs = g_inner_product(psi, h.H_plus.matrix() * phi, eta);
    const Complex rhs = g_inner_product(h.H_plus.matrix() * psi, phi, eta);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
    const Complex sum = g_inner_product(psi, phi + chi, eta);
    CHECK(std::abs(sum - g_inner_product(psi, phi, eta) - g_inner_product(psi, chi, eta)) < 1e-12);
  }
  CHECK_THROWS_AS(g_inner_product(DenseVector::Zero(3), DenseVector::Zero(3), eta), std::invalid_argument);
}

TEST_CASE("defining relations of every realization") {
  for (std::size_t N : {6, 10, 14}) {
    const FockSpace s(2, N, 1.0);
    for (const auto name : kAll) {
      const auto rep = check_algebra(build_realization(name, s), 2);
      INFO(to_string(name) << " N=" << N);
      for (const auto& r : rep.relations) {
        INFO(r.name);
        CHECK(r.residual < 1e-12);
      }
      CHECK(rep.bracket_sign == expected_bracket_sign(name));
    }
  }
}

TEST_CASE("hermiticity classification") {
  const FockSpace s(2, 10, 1.0);
  using H = Hermiticity;
  const auto cls = [&](RealizationName n) { return check_algebra(build_realization(n, s), 2).hermiticity; };
  CHECK(cls(RealizationName::su2_js) == std::array<H, 3>{H::hermitian, H::hermitian, H::hermitian});
  CHECK(cls(RealizationName::su11_pseudochiral) == std::array<H, 3>{H::hermitian, H::anti_hermitian, H::anti_hermitian});
  CHECK(cls(RealizationName::su11_pseudochiral_hermitian_map) == std::array<H, 3>{H::hermitian, H::hermitian, H::hermitian});
  CHECK(cls(RealizationName::su11_standard) == std::array<H, 3>{H::hermitian, H::hermitian, H::hermitian});
  CHECK(classify_hermiticity(annihilation(s, 0), ProjectedSubspace(s, 2)) == H::neither);
}

TEST_CASE("hermitian remapping written out") {
  // Jx = i/2 (a~a - b~b), Jy = 1/2 (a~b - b~a), Jz = -1/2 (a~b + b~a)
  const FockSpace s(2, 10, 1.0);
  const auto m = build_pseudochiral_modes(s);
  const auto r = build_realization(RealizationName::su11_pseudochiral_hermitian_map, s);
  const ProjectedSubspace k2(s, 2);
  CHECK(diff(r.Jx, Complex(0, 0.5) * (m.a_tilde * m.a - m.b_tilde * m.b), k2) < 1e-12);
  CHECK(diff(r.Jy, 0.5 * (m.a_tilde * m.b - m.b_tilde * m.a), k2) < 1e-12);
  CHECK(diff(r.Jz, -0.5 * (m.a_tilde * m.b + m.b_tilde * m.a), k2) < 1e-12);
}

TEST_CASE("SU(2) Jz is the sum of the two chiral pieces") {
  const FockSpace s(2, 8, 1.0);
  const auto r = build_realization(RealizationName::su2_js, s);
  const auto jaz = 0.5 * number(s, 0);
  const auto jbz = -0.5 * number(s, 1);
  CHECK((r.Jz.matrix() - (jaz + jbz).matrix()).norm() < 1e-14);
}

TEST_CASE("Casimir factorization") {
  const FockSpace s(2, 12, 1.0);
  const auto su2 = casimir_factorization(build_realization(RealizationName::su2_js, s), 2);
  CHECK(su2.factorizes);
  CHECK(su2.residual < 1e-12);
  // j(j+1) with j = (n_a + n_b)/2
  for (const auto& e : su2.sample_eigenvalues) {
    const double j = (e[0] + e[1]) / 2;
    CHECK(std::abs(e[2] - j * (j + 1)) < 1e-12);
  }
  const auto pc = casimir_factorization(build_realization(RealizationName::su11_pseudochiral, s), 2);
  CHECK(pc.factorizes);
  CHECK(pc.residual < 1e-12);

  const auto std11 = casimir_factorization(build_realization(RealizationName::su11_standard, s), 2);
  CHECK_FALSE(std11.factorizes);
  CHECK(std11.residual > 1.0);
  CHECK(std11.candidate_vacuum_value == 0.0);
  CHECK(std::abs(std11.vacuum_value + 0.25) < 1e-14);
}

TEST_CASE("standard SU(1,1) Casimir on number states") {
  // brute force: <n_a n_b| C |n_a n_b> against ((n_a - n_b)^2 - 1)/4
  const FockSpace s(2, 9, 1.0);
  const auto r = build_realization(RealizationName::su11_standard, s);
  const ProjectedSubspace k2(s, 2);
  for (std::size_t idx : k2.indices()) {
    const auto occ = s.occupations(idx);
    const double d = static_cast<double>(occ[0]) - static_cast<double>(occ[1]);
    const auto e = s.basis_state(occ);
    CHECK(std::abs(e.dot(r.casimir.matrix() * e) - (d * d - 1) / 4) < 1e-12);
  }
  CHECK(diff(r.casimir, standard_su11_casimir_number_form(s), k2) < 1e-12);
  // the often-quoted variant differs already on the vacuum
  const auto v = static_cast<Eigen::Index>(s.index_of({0, 0}));
  CHECK(standard_su11_casimir_quoted_form(s).matrix()(v, v).real() == -0.5);
}

TEST_CASE("pseudo-hermiticity of the pseudo-chiral Hamiltonians") {
  const FockSpace s(2, 10, 1.2);
  const auto rep = check_pseudo_hermiticity(s, 2);
  for (const auto& r : rep.relations) {
    INFO(r.name);
    CHECK(r.residual < 1e-12);
  }
  CHECK(rep.a_b_exact == 0.0);
  // [a, b~] vanishes only away from the cutoff
  CHECK(rep.a_btilde_exact > 1.0);
  CHECK(rep.atilde_vs_adjoint > 0.1);
  CHECK(rep.zero_point_shift == 1.2);
  const auto h = pseudochiral_hamiltonians(s);
  CHECK((h.H_plus.adjoint().matrix() - h.H_minus.matrix()).norm() < 1e-12);
  CHECK((h.H_plus.matrix() - h.H_plus.adjoint().matrix()).norm() > 1.0);
}

TEST_CASE("spectra of the direct and indirect Hamiltonians") {
  const auto sp = spectra(FockSpace(2, 4, 1.0), 0);
  const std::vector<double> lowest(sp.H_D.eigenvalues.begin(), sp.H_D.eigenvalues.begin() + 6);
  const std::vector<double> expected{0, 1, 1, 2, 2, 2};
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(lowest[k] - expected[k]) < 1e-12);
  CHECK(sp.H_I.eigenvalues.front() == Catch::Approx(-3.0));
  CHECK(sp.H_I.eigenvalues.back() == Catch::Approx(3.0));
  for (std::size_t k = 0; k < sp.H_I.eigenvalues.size(); ++k)
    CHECK(std::abs(sp.H_I.eigenvalues[k] + sp.H_I.eigenvalues[sp.H_I.eigenvalues.size() - 1 - k]) < 1e-12);

  const double w = 0.75;
  const auto s8 = spectra(FockSpace(2, 8, w), 2);
  for (const auto* t : {&s8.H_D, &s8.H_I}) {
    CHECK(t->max_deviation < 1e-12);
    CHECK(t->integrality_defect < 1e-12);
    CHECK(t->legendre_residual < 1e-12);
  }
  CHECK(s8.H_D.zero_point == Catch::Approx(w));
  CHECK(std::abs(s8.H_I.zero_point) < 1e-14);
  CHECK(s8.H_plus.raising_residual < 1e-12);
  CHECK(s8.H_plus.lowering_residual < 1e-12);
  CHECK(s8.H_minus.raising_residual < 1e-12);
}

TEST_CASE("realization names") {
  for (const auto& [n, str] : kRealizationNames) CHECK(parse_realization(str) == n);
  CHECK_THROWS_AS(parse_realization("su3"), std::invalid_argument);
  CHECK_THROWS_AS(build_realization(RealizationName::su2_js, FockSpace(1, 4)), std::invalid_argument);
}

TEST_CASE("algebra report JSON") {
  const auto rep = check_algebra(build_realization(RealizationName::su11_pseudochiral, FockSpace(2, 6)), 2);
  const auto j = to_json(rep);
  CHECK(j["realization"] == "su11_pseudochiral");
  CHECK(j["cutoff"] == 6);
  CHECK(j["guard"] == 2);
  CHECK(j["relations"].size() == rep.relations.size());
  CHECK(j["hermiticity"]["Jy"] == "anti-hermitian");
  CHECK(j["casimir"]["factorizes"] == true);
  CHECK(j["casimir"].contains("sample_eigenvalues"));
}
