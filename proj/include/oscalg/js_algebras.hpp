// Two-boson realizations of SU(2) and SU(1,1): the Jordan-Schwinger SU(2),
// the pseudo-chiral SU(1,1) built from g-adjoint ladder pairs, its all-
// hermitian remapping, and the standard two-boson SU(1,1).
//
// Mode 0 carries (x1, p1), mode 1 carries (x2, p2). Identities are checked on
// the guarded subspace: an identity whose terms hold at most 2k ladder factors
// is free of truncation artifacts on ProjectedSubspace(k).

#ifndef OSCALG_JS_ALGEBRAS_HPP
#define OSCALG_JS_ALGEBRAS_HPP

#include "oscalg/dynamics.hpp"
#include "oscalg/fock.hpp"
#include "oscalg/lagrangian.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oscalg {

namespace detail {
inline void require_two_modes(const FockSpace& space, const char* who) {
  if (space.n_modes() != 2) throw std::invalid_argument(std::string(who) + ": needs a two-mode space");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Pseudo-chiral ladder operators

struct PseudoChiralModes {
  OperatorMatrix x_plus, p_plus, x_minus, p_minus;
  OperatorMatrix a, b, a_tilde, b_tilde;
};

/// x+- = (x1 +- i p2/omega)/sqrt2, p+- = (p1 +- i omega x2)/sqrt2,
/// a = sqrt(omega/2)(x+ + i p+/omega), a~ = sqrt(omega/2)(x+ - i p+/omega),
/// and likewise b, b~ from (x-, p-).
inline PseudoChiralModes build_pseudochiral_modes(const FockSpace& space) {
  detail::require_two_modes(space, "build_pseudochiral_modes");
  const double w = space.omega();
  const Complex i(0.0, 1.0);
  const double r2 = 1.0 / std::sqrt(2.0);
  const auto [x1, p1] = position_momentum(space, 0);
  const auto [x2, p2] = position_momentum(space, 1);
  const OperatorMatrix xp = (r2 * (x1 + (i / w) * p2)).relabel("x+");
  const OperatorMatrix xm = (r2 * (x1 - (i / w) * p2)).relabel("x-");
  const OperatorMatrix pp = (r2 * (p1 + (i * w) * x2)).relabel("p+");
  const OperatorMatrix pm = (r2 * (p1 - (i * w) * x2)).relabel("p-");
  const double s = std::sqrt(w / 2.0);
  return {xp,
          pp,
          xm,
          pm,
          (s * (xp + (i / w) * pp)).relabel("a"),
          (s * (xm + (i / w) * pm)).relabel("b"),
          (s * (xp - (i / w) * pp)).relabel("a~"),
          (s * (xm - (i / w) * pm)).relabel("b~")};
}

// ---------------------------------------------------------------------------
// eta = PT

/// Antiunitary operator U K (K = complex conjugation in the Fock basis), or a
/// plain unitary when `conjugates` is false.
struct AntiunitaryOperator {
  DenseMatrix U;
  bool conjugates = true;

  DenseVector apply(const DenseVector& psi) const { return U * (conjugates ? DenseVector(psi.conjugate()) : psi); }

  /// eta O eta^-1.
  OperatorMatrix conjugate(const OperatorMatrix& O) const {
    const DenseMatrix inner = conjugates ? DenseMatrix(O.matrix().conjugate()) : O.matrix();
    return {O.space(), U * inner * U.adjoint(), "eta " + O.label() + " eta^-1"};
  }

  /// eta^-1 O eta: U^-1 O U followed by entrywise conjugation.
  OperatorMatrix inverse_conjugate(const OperatorMatrix& O) const {
    const DenseMatrix inner = U.adjoint() * O.matrix() * U;
    return {O.space(), conjugates ? DenseMatrix(inner.conjugate()) : inner, "eta^-1 " + O.label() + " eta"};
  }
};

/// Residuals of eta x_i eta^-1 = g_ij x_j and eta p_i eta^-1 = -g_ij p_j.
struct EtaRelations {
  double x1 = 0.0, x2 = 0.0, p1 = 0.0, p2 = 0.0;
  double max() const { return std::max({x1, x2, p1, p2}); }
};

inline EtaRelations eta_relations(const AntiunitaryOperator& eta, const FockSpace& space) {
  const auto [x1, p1] = position_momentum(space, 0);
  const auto [x2, p2] = position_momentum(space, 1);
  auto diff = [](const OperatorMatrix& a, const OperatorMatrix& b) { return (a.matrix() - b.matrix()).norm(); };
  return {diff(eta.conjugate(x1), x1), diff(eta.conjugate(x2), -1.0 * x2), diff(eta.conjugate(p1), -1.0 * p1),
          diff(eta.conjugate(p2), p2)};
}

/// eta = (-1)^{n_2} composed with Fock-basis conjugation. The four defining
/// relations are verified before returning.
inline AntiunitaryOperator build_eta(const FockSpace& space, double tolerance = 1e-12) {
  detail::require_two_modes(space, "build_eta");
  const auto n = static_cast<Eigen::Index>(space.dimension());
  DenseMatrix U = DenseMatrix::Zero(n, n);
  for (std::size_t k = 0; k < space.dimension(); ++k)
    U(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = space.occupations(k)[1] % 2 == 0 ? 1.0 : -1.0;
  AntiunitaryOperator eta{U, true};
  const auto rel = eta_relations(eta, space);
  if (!(rel.max() < tolerance))
    throw std::runtime_error("build_eta: construction violates eta x eta^-1 = g x / eta p eta^-1 = -g p (residual " +
                             std::to_string(rel.max()) + ")");
  return eta;
}

/// O~ = eta^-1 O^dag eta.
inline OperatorMatrix g_adjoint(const OperatorMatrix& O, const AntiunitaryOperator& eta) {
  const auto n = static_cast<Eigen::Index>(O.space().dimension());
  if (eta.U.rows() != n) throw std::invalid_argument("g_adjoint: eta acts on a different dimension");
  return eta.inverse_conjugate(O.adjoint()).relabel(O.label() + "~");
}

/// <<psi|phi>> = <eta psi|phi>.
inline Complex g_inner_product(const DenseVector& psi, const DenseVector& phi, const AntiunitaryOperator& eta) {
  if (psi.size() != phi.size() || psi.size() != eta.U.rows())
    throw std::invalid_argument("g_inner_product: dimension mismatch");
  return eta.apply(psi).dot(phi);
}

// ---------------------------------------------------------------------------
// Realizations

enum class RealizationName { su2_js, su11_pseudochiral, su11_pseudochiral_hermitian_map, su11_standard };

inline constexpr std::array<std::pair<RealizationName, std::string_view>, 4> kRealizationNames{{
    {RealizationName::su2_js, "su2_js"},
    {RealizationName::su11_pseudochiral, "su11_pseudochiral"},
    {RealizationName::su11_pseudochiral_hermitian_map, "su11_pseudochiral_hermitian_map"},
    {RealizationName::su11_standard, "su11_standard"},
}};

inline std::string_view to_string(RealizationName name) {
  for (const auto& [n, s] : kRealizationNames)
    if (n == name) return s;
  throw std::invalid_argument("unknown realization");
}

inline RealizationName parse_realization(std::string_view s) {
  for (const auto& [n, str] : kRealizationNames)
    if (str == s) return n;
  throw std::invalid_argument("unknown realization '" + std::string(s) + "'");
}

/// +1 for [J+, J-] = 2 Jz (SU(2)), -1 for [J+, J-] = -2 Jz (SU(1,1)).
inline int expected_bracket_sign(RealizationName name) { return name == RealizationName::su2_js ? 1 : -1; }

struct AlgebraRealization {
  RealizationName name;
  OperatorMatrix Jx, Jy, Jz, Jplus, Jminus;
  OperatorMatrix casimir;
  /// Number-like operator N whose (N/2)(N/2 + 1) is the candidate factorized Casimir.
  OperatorMatrix total_number;

  const FockSpace& space() const { return Jz.space(); }
};

namespace detail {

inline AlgebraRealization from_ladder(RealizationName name, const OperatorMatrix& Jz, const OperatorMatrix& Jp,
                                      const OperatorMatrix& Jm, const OperatorMatrix& total_number) {
  const Complex i(0.0, 1.0);
  const OperatorMatrix Jx = (0.5 * (Jp + Jm)).relabel("Jx");
  const OperatorMatrix Jy = (Complex(0.0, -0.5) * (Jp - Jm)).relabel("Jy");
  const double s = expected_bracket_sign(name);
  const OperatorMatrix C = (Jz * Jz + (0.5 * s) * (Jp * Jm + Jm * Jp)).relabel("C");
  (void)i;
  return {name, Jx, Jy, Jz.relabel("Jz"), Jp.relabel("J+"), Jm.relabel("J-"), C, total_number};
}

inline AlgebraRealization from_cartesian(RealizationName name, const OperatorMatrix& Jx, const OperatorMatrix& Jy,
                                         const OperatorMatrix& Jz, const OperatorMatrix& total_number) {
  const Complex i(0.0, 1.0);
  const OperatorMatrix Jp = (Jx + i * Jy).relabel("J+");
  const OperatorMatrix Jm = (Jx - i * Jy).relabel("J-");
  const double s = expected_bracket_sign(name);
  const OperatorMatrix C = (Jz * Jz + (0.5 * s) * (Jp * Jm + Jm * Jp)).relabel("C");
  return {name, Jx.relabel("Jx"), Jy.relabel("Jy"), Jz.relabel("Jz"), Jp, Jm, C, total_number};
}

}  // namespace detail

inline AlgebraRealization build_realization(RealizationName name, const FockSpace& space) {
  detail::require_two_modes(space, "build_realization");
  const OperatorMatrix a = annihilation(space, 0);
  const OperatorMatrix b = annihilation(space, 1);
  const OperatorMatrix ad = a.adjoint();
  const OperatorMatrix bd = b.adjoint();
  switch (name) {
    case RealizationName::su2_js:
      return detail::from_ladder(name, 0.5 * (ad * a - bd * b), ad * b, a * bd, ad * a + bd * b);
    case RealizationName::su11_standard:
      return detail::from_ladder(name, 0.5 * (ad * a + b * bd), ad * bd, a * b, ad * a + bd * b);
    case RealizationName::su11_pseudochiral: {
      const auto m = build_pseudochiral_modes(space);
      return detail::from_ladder(name, 0.5 * (m.a_tilde * m.a - m.b_tilde * m.b), m.a_tilde * m.b,
                                 -1.0 * (m.b_tilde * m.a), m.a_tilde * m.a + m.b_tilde * m.b);
    }
    case RealizationName::su11_pseudochiral_hermitian_map: {
      // Jx -> Jy, Jy -> i Jz, Jz -> -i Jx: new (Jx, Jy, Jz) = (i Jz, Jx, -i Jy) of the pseudo-chiral set
      const auto base = build_realization(RealizationName::su11_pseudochiral, space);
      const Complex i(0.0, 1.0);
      return detail::from_cartesian(name, i * base.Jz, base.Jx, -i * base.Jy, base.total_number);
    }
  }
  throw std::invalid_argument("build_realization: unknown realization");
}

// ---------------------------------------------------------------------------
// Checks

enum class Hermiticity { hermitian, anti_hermitian, neither };

inline std::string_view to_string(Hermiticity h) {
  switch (h) {
    case Hermiticity::hermitian:
      return "hermitian";
    case Hermiticity::anti_hermitian:
      return "anti-hermitian";
    case Hermiticity::neither:
      break;
  }
  return "neither";
}

inline Hermiticity classify_hermiticity(const OperatorMatrix& O, const ProjectedSubspace& sub, double threshold = 1e-10) {
  const DenseMatrix m = sub.compress(O.matrix());
  if ((m - m.adjoint()).norm() < threshold) return Hermiticity::hermitian;
  if ((m + m.adjoint()).norm() < threshold) return Hermiticity::anti_hermitian;
  return Hermiticity::neither;
}

struct RelationResidual {
  std::string name;
  double residual = 0.0;
};

struct CasimirCheck {
  bool factorizes = false;
  double residual = 0.0;
  /// <0,0|C|0,0> and the candidate (N/2)(N/2+1) on the same state.
  double vacuum_value = 0.0;
  double candidate_vacuum_value = 0.0;
  /// Largest off-diagonal entry of P C P in the Fock basis.
  double offdiagonal = 0.0;
  /// (n1, n2, <n1,n2|C|n1,n2>) on a few low states.
  std::vector<std::array<double, 3>> sample_eigenvalues;
};

struct AlgebraReport {
  RealizationName realization;
  std::size_t cutoff = 0;
  std::size_t guard = 0;
  std::vector<RelationResidual> relations;
  /// Sign s for which [J+, J-] = 2 s Jz fits best.
  int bracket_sign = 0;
  std::array<Hermiticity, 3> hermiticity{};
  CasimirCheck casimir;
  double threshold = 1e-12;

  double max_residual() const {
    double m = 0.0;
    for (const auto& r : relations) m = std::max(m, r.residual);
    return m;
  }
};

/// Candidate factorization (N/2)(N/2 + 1) of the Casimir, compared on the
/// guarded subspace.
inline CasimirCheck casimir_factorization(const AlgebraRealization& r, std::size_t guard, double threshold = 1e-12) {
  const ProjectedSubspace sub(r.space(), guard);
  const OperatorMatrix half_n = 0.5 * r.total_number;
  const OperatorMatrix candidate = half_n * (half_n + OperatorMatrix::identity(r.space()));
  CasimirCheck out;
  out.residual = residual_on_subspace(r.casimir, candidate, sub);
  out.factorizes = out.residual < threshold;
  const auto v = static_cast<Eigen::Index>(r.space().index_of({0, 0}));
  out.vacuum_value = r.casimir.matrix()(v, v).real();
  out.candidate_vacuum_value = candidate.matrix()(v, v).real();
  DenseMatrix pc = sub.compress(r.casimir.matrix());
  pc.diagonal().setZero();
  out.offdiagonal = pc.cwiseAbs().maxCoeff();
  const std::size_t top = r.space().cutoff() - 1 - guard;
  for (const std::array<std::size_t, 2> occ : {std::array<std::size_t, 2>{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}) {
    if (occ[0] > top || occ[1] > top) continue;
    const auto k = static_cast<Eigen::Index>(r.space().index_of({occ[0], occ[1]}));
    out.sample_eigenvalues.push_back(
        {static_cast<double>(occ[0]), static_cast<double>(occ[1]), r.casimir.matrix()(k, k).real()});
  }
  return out;
}

inline AlgebraReport check_algebra(const AlgebraRealization& r, std::size_t guard, double threshold = 1e-12,
                                   double hermiticity_threshold = 1e-10) {
  const ProjectedSubspace sub(r.space(), guard);
  const Complex i(0.0, 1.0);
  AlgebraReport rep;
  rep.realization = r.name;
  rep.cutoff = r.space().cutoff();
  rep.guard = guard;
  rep.threshold = threshold;
  const int s = expected_bracket_sign(r.name);

  auto rel = [&](std::string name, const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    rep.relations.push_back({std::move(name), residual_on_subspace(lhs, rhs, sub)});
  };
  rel("[Jz,J+] = +J+", commutator(r.Jz, r.Jplus), r.Jplus);
  rel("[Jz,J-] = -J-", commutator(r.Jz, r.Jminus), -1.0 * r.Jminus);
  rel(s > 0 ? "[J+,J-] = +2Jz" : "[J+,J-] = -2Jz", commutator(r.Jplus, r.Jminus), (2.0 * s) * r.Jz);
  rel("J+ = Jx + iJy", r.Jplus, r.Jx + i * r.Jy);
  rel("J- = Jx - iJy", r.Jminus, r.Jx - i * r.Jy);

  // The Casimir carries four ladder factors, so its commutators need guard 3.
  const ProjectedSubspace sub3(r.space(), std::min(std::max<std::size_t>(guard, 3), r.space().cutoff() - 1));
  for (const auto* g : {&r.Jx, &r.Jy, &r.Jz})
    rep.relations.push_back({"[C," + g->label() + "] = 0", norm_on_subspace(commutator(r.casimir, *g), sub3)});

  const OperatorMatrix bracket = commutator(r.Jplus, r.Jminus);
  const double plus = residual_on_subspace(bracket, 2.0 * r.Jz, sub);
  const double minus = residual_on_subspace(bracket, -2.0 * r.Jz, sub);
  rep.bracket_sign = plus <= minus ? 1 : -1;

  rep.hermiticity = {classify_hermiticity(r.Jx, sub, hermiticity_threshold),
                     classify_hermiticity(r.Jy, sub, hermiticity_threshold),
                     classify_hermiticity(r.Jz, sub, hermiticity_threshold)};
  rep.casimir = casimir_factorization(r, guard, threshold);
  return rep;
}

/// Standard two-boson SU(1,1) Casimir in number form, (n_a - n_b)^2/4 - 1/4,
/// as it follows from the generators.
inline OperatorMatrix standard_su11_casimir_number_form(const FockSpace& space) {
  const OperatorMatrix d = number(space, 0) - number(space, 1);
  return 0.25 * (d * d) - 0.25 * OperatorMatrix::identity(space);
}

/// The variant (n_a - n_b)^2/4 - (n_a + n_b + 1)/2 that is often quoted for
/// the same Casimir. It differs from the generator form by (n_a + n_b)/2 + 1/4
/// and is kept only so reports can show both vacuum values.
inline OperatorMatrix standard_su11_casimir_quoted_form(const FockSpace& space) {
  const OperatorMatrix na = number(space, 0);
  const OperatorMatrix nb = number(space, 1);
  const OperatorMatrix d = na - nb;
  return 0.25 * (d * d) - 0.5 * (na + nb + OperatorMatrix::identity(space));
}

inline nlohmann::ordered_json to_json(const AlgebraReport& rep) {
  nlohmann::ordered_json j;
  j["realization"] = to_string(rep.realization);
  j["cutoff"] = rep.cutoff;
  j["guard"] = rep.guard;
  j["threshold"] = rep.threshold;
  j["relations"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.relations) j["relations"].push_back({{"name", r.name}, {"residual", r.residual}});
  j["bracket_sign"] = rep.bracket_sign;
  j["hermiticity"] = {{"Jx", to_string(rep.hermiticity[0])},
                      {"Jy", to_string(rep.hermiticity[1])},
                      {"Jz", to_string(rep.hermiticity[2])}};
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const auto& s : rep.casimir.sample_eigenvalues)
    samples.push_back({{"state", {static_cast<int>(s[0]), static_cast<int>(s[1])}}, {"value", s[2]}});
  j["casimir"] = {{"factorizes", rep.casimir.factorizes},
                  {"residual", rep.casimir.residual},
                  {"vacuum_value", rep.casimir.vacuum_value},
                  {"candidate_vacuum_value", rep.casimir.candidate_vacuum_value},
                  {"offdiagonal", rep.casimir.offdiagonal},
                  {"sample_eigenvalues", samples}};
  return j;
}

// ---------------------------------------------------------------------------
// Pseudo-hermiticity

/// Symmetric quantization 1/2 sum_ij H_ij Z_i Z_j of a quadratic Hamiltonian
/// over the phase-space operators `phase` (ordered as h.labels).
inline OperatorMatrix quantize(const QuadraticHamiltonian<Complex>& h, const std::vector<OperatorMatrix>& phase) {
  if (phase.size() != h.labels.size()) throw std::invalid_argument("quantize: operator count mismatch");
  OperatorMatrix out = OperatorMatrix::zero(phase.front().space());
  for (std::size_t r = 0; r < phase.size(); ++r)
    for (std::size_t c = 0; c < phase.size(); ++c) {
      const Complex hij = h.H(r, c);
      if (hij == Complex(0.0)) continue;
      out = out + (0.5 * hij) * (phase[r] * phase[c]);
    }
  return out;
}

struct PseudoChiralHamiltonians {
  OperatorMatrix H_plus;   // 1/2 p+^2 + 1/2 omega^2 x+^2
  OperatorMatrix H_minus;  // 1/2 p-^2 + 1/2 omega^2 x-^2
  OperatorMatrix H_I;      // (1/2 p1^2 + 1/2 omega^2 x1^2) - (1/2 p2^2 + 1/2 omega^2 x2^2)
};

/// Quantizes the Legendre transform of the hyperbolic indirect Lagrangian and
/// its image under the complex canonical split.
inline PseudoChiralHamiltonians pseudochiral_hamiltonians(const FockSpace& space) {
  detail::require_two_modes(space, "pseudochiral_hamiltonians");
  const Complex w(space.omega());
  const auto hI = legendre(builtin_lagrangian<Complex>(LagrangianKind::indirect_hyperbolic, w));
  const auto split = transform_hamiltonian(hI, complex_split_map<Complex>(w), canonical_poisson<Complex>(2));
  const auto [x1, p1] = position_momentum(space, 0);
  const auto [x2, p2] = position_momentum(space, 1);
  const auto m = build_pseudochiral_modes(space);
  // (x+, x-, p+, p-) with the cross terms dropped per block
  auto block = [&](std::size_t idx) {
    const std::vector<OperatorMatrix> ops{m.x_plus, m.x_minus, m.p_plus, m.p_minus};
    SmallMatrix<Complex> Hb(4, 4);
    Hb(idx, idx) = split.H(idx, idx);
    Hb(idx + 2, idx + 2) = split.H(idx + 2, idx + 2);
    return quantize({split.labels, Hb, split.poisson}, ops);
  };
  return {block(0).relabel("H+"), block(1).relabel("H-"), quantize(hI, {x1, x2, p1, p2}).relabel("H_I")};
}

struct PseudoHermiticityReport {
  std::size_t cutoff = 0;
  std::size_t guard = 0;
  std::vector<RelationResidual> relations;
  /// Full-space (unguarded) norms of [a, b~] and [a, b].
  double a_btilde_exact = 0.0;
  double a_b_exact = 0.0;
  /// max |a~ - a^dag|: the g-adjoint differs from the ordinary adjoint.
  double atilde_vs_adjoint = 0.0;
  /// omega a~a + omega b~b = H_I - shift on the guarded subspace.
  double zero_point_shift = 0.0;
};

inline PseudoHermiticityReport check_pseudo_hermiticity(const FockSpace& space, std::size_t guard) {
  detail::require_two_modes(space, "check_pseudo_hermiticity");
  const ProjectedSubspace sub(space, guard);
  const ProjectedSubspace sub1(space, std::max<std::size_t>(guard, 1));
  const auto eta = build_eta(space);
  const auto m = build_pseudochiral_modes(space);
  const auto h = pseudochiral_hamiltonians(space);
  const OperatorMatrix I = OperatorMatrix::identity(space);
  const double w = space.omega();

  PseudoHermiticityReport rep;
  rep.cutoff = space.cutoff();
  rep.guard = guard;
  auto rel = [&](std::string name, const OperatorMatrix& lhs, const OperatorMatrix& rhs, const ProjectedSubspace& s) {
    rep.relations.push_back({std::move(name), residual_on_subspace(lhs, rhs, s)});
  };
  const auto er = eta_relations(eta, space);
  rep.relations.push_back({"eta x1 eta^-1 = x1", er.x1});
  rep.relations.push_back({"eta x2 eta^-1 = -x2", er.x2});
  rep.relations.push_back({"eta p1 eta^-1 = -p1", er.p1});
  rep.relations.push_back({"eta p2 eta^-1 = p2", er.p2});
  rel("eta H+ eta^-1 = H+^dag", eta.conjugate(h.H_plus), h.H_plus.adjoint(), sub);
  rel("eta H- eta^-1 = H-^dag", eta.conjugate(h.H_minus), h.H_minus.adjoint(), sub);
  rel("H+^dag = H-", h.H_plus.adjoint(), h.H_minus, sub);
  rel("g_adjoint(a) = a~", g_adjoint(m.a, eta), m.a_tilde, sub);
  rel("g_adjoint(b) = b~", g_adjoint(m.b, eta), m.b_tilde, sub);
  rel("[a,a~] = 1", commutator(m.a, m.a_tilde), I, sub1);
  rel("[b,b~] = 1", commutator(m.b, m.b_tilde), I, sub1);
  rel("[a,b~] = 0", commutator(m.a, m.b_tilde), OperatorMatrix::zero(space), sub1);
  rel("[a,b] = 0", commutator(m.a, m.b), OperatorMatrix::zero(space), sub1);
  rel("H+ = omega (a~a + 1/2)", h.H_plus, w * (m.a_tilde * m.a + 0.5 * I), sub);
  rel("H- = omega (b~b + 1/2)", h.H_minus, w * (m.b_tilde * m.b + 0.5 * I), sub);
  rel("H_I = H+ + H-", h.H_I, h.H_plus + h.H_minus, sub);
  rep.zero_point_shift = w;
  const OperatorMatrix hI_number = w * (number(space, 0) - number(space, 1));
  rel("omega a~a + omega b~b = H_I - omega", w * (m.a_tilde * m.a + m.b_tilde * m.b), hI_number - w * I, sub);
  rep.a_btilde_exact = commutator(m.a, m.b_tilde).matrix().norm();
  rep.a_b_exact = commutator(m.a, m.b).matrix().norm();
  rep.atilde_vs_adjoint = (m.a_tilde.matrix() - m.a.adjoint().matrix()).cwiseAbs().maxCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// Spectra

struct SpectrumTable {
  std::string name;
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> expected;     // enumeration of omega * (integer), ascending
  double max_deviation = 0.0;
  /// Largest distance of eigenvalue/omega from an integer.
  double integrality_defect = 0.0;
  /// Guarded residual between the quantized Legendre Hamiltonian (zero point
  /// subtracted) and the number-operator form used for the table.
  double legendre_residual = 0.0;
  double zero_point = 0.0;
};

struct LadderSpectrum {
  std::string name;
  /// [H, creation] = +omega creation, [H, annihilation] = -omega annihilation.
  double raising_residual = 0.0;
  double lowering_residual = 0.0;
  /// Eigenvalues of the guarded truncation of the number form; complex
  /// because the annihilator's vacuum is not normalizable in the Fock basis.
  std::vector<Complex> truncated_eigenvalues;
  double max_imaginary_part = 0.0;
};

struct Spectra {
  SpectrumTable H_D;
  SpectrumTable H_I;
  LadderSpectrum H_plus;
  LadderSpectrum H_minus;
};

namespace detail {

inline std::vector<double> sorted_real_eigenvalues(const DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

inline SpectrumTable tabulate(std::string name, const OperatorMatrix& number_form, const OperatorMatrix& legendre_form,
                              double zero_point, int sign2, const ProjectedSubspace& sub,
                              const ProjectedSubspace& sub_legendre) {
  const double w = number_form.space().omega();
  SpectrumTable t;
  t.name = std::move(name);
  t.zero_point = zero_point;
  t.eigenvalues = sorted_real_eigenvalues(sub.compress(number_form.matrix()));
  for (std::size_t idx : sub.indices()) {
    const auto occ = number_form.space().occupations(idx);
    t.expected.push_back(w * (static_cast<double>(occ[0]) + sign2 * static_cast<double>(occ[1])));
  }
  std::sort(t.expected.begin(), t.expected.end());
  for (std::size_t k = 0; k < t.eigenvalues.size(); ++k) {
    t.max_deviation = std::max(t.max_deviation, std::abs(t.eigenvalues[k] - t.expected[k]));
    const double q = t.eigenvalues[k] / w;
    t.integrality_defect = std::max(t.integrality_defect, std::abs(q - std::round(q)));
  }
  t.legendre_residual = residual_on_subspace(
      legendre_form - zero_point * OperatorMatrix::identity(number_form.space()), number_form, sub_legendre);
  return t;
}

}  // namespace detail

/// Spectra of H_D = omega(n1 + n2), H_I = omega(n1 - n2) (zero point
/// subtracted) on the guarded subspace, cross-checked against the quantized
/// Legendre Hamiltonians, plus the ladder structure of the pseudo-chiral
/// Hamiltonians omega a~a and omega b~b.
inline Spectra spectra(const FockSpace& space, std::size_t guard) {
  detail::require_two_modes(space, "spectra");
  const double w = space.omega();
  const Complex wc(w);
  const ProjectedSubspace sub(space, guard);
  // x^2 and p^2 carry two ladder factors
  const ProjectedSubspace sub_legendre(space, std::min(std::max<std::size_t>(guard, 1), space.cutoff() - 1));
  const auto [x1, p1] = position_momentum(space, 0);
  const auto [x2, p2] = position_momentum(space, 1);
  const std::vector<OperatorMatrix> phase{x1, x2, p1, p2};
  const OperatorMatrix n1 = number(space, 0);
  const OperatorMatrix n2 = number(space, 1);

  const auto hD = quantize(legendre(builtin_lagrangian<Complex>(LagrangianKind::bidimensional_direct, wc)), phase);
  const auto hI = quantize(legendre(builtin_lagrangian<Complex>(LagrangianKind::indirect_hyperbolic, wc)), phase);
  const auto vacuum = static_cast<Eigen::Index>(space.index_of({0, 0}));

  Spectra out;
  out.H_D = detail::tabulate("H_D", w * (n1 + n2), hD, hD.matrix()(vacuum, vacuum).real(), +1, sub, sub_legendre);
  out.H_I = detail::tabulate("H_I", w * (n1 - n2), hI, hI.matrix()(vacuum, vacuum).real(), -1, sub, sub_legendre);

  const auto m = build_pseudochiral_modes(space);
  // [omega a~a, a~] has three ladder factors per term
  const ProjectedSubspace sub_ladder(space, std::min(std::max<std::size_t>(guard, 2), space.cutoff() - 1));
  auto ladder = [&](std::string name, const OperatorMatrix& lower, const OperatorMatrix& raise) {
    LadderSpectrum ls;
    ls.name = std::move(name);
    const OperatorMatrix h = w * (raise * lower);
    ls.raising_residual = residual_on_subspace(commutator(h, raise), w * raise, sub_ladder);
    ls.lowering_residual = residual_on_subspace(commutator(h, lower), -w * lower, sub_ladder);
    Eigen::ComplexEigenSolver<DenseMatrix> es(sub.compress(h.matrix()), false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      ls.truncated_eigenvalues.push_back(es.eigenvalues()(k));
      ls.max_imaginary_part = std::max(ls.max_imaginary_part, std::abs(es.eigenvalues()(k).imag()));
    }
    std::sort(ls.truncated_eigenvalues.begin(), ls.truncated_eigenvalues.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ls;
  };
  out.H_plus = ladder("H+ = omega a~a", m.a, m.a_tilde);
  out.H_minus = ladder("H- = omega b~b", m.b, m.b_tilde);
  return out;
}

}  // namespace oscalg

#endif  // OSCALG_JS_ALGEBRAS_HPP
