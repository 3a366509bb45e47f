// Quadratic Lagrangians over finite coordinate charts.
//
//   L = 1/2 qdot^T K qdot + qdot^T C q + 1/2 q^T V q
//
// Two Lagrangians are treated as equivalent when their Euler-Lagrange normal
// forms (K, antisymmetric part of C, V) agree: the symmetric part of C only
// contributes the total derivative d/dt(1/2 q^T S q).
//
// Conventions: eps(1,2) = +1, sigma = first Pauli matrix, g = diag(1, -1).

#ifndef OSCALG_LAGRANGIAN_HPP
#define OSCALG_LAGRANGIAN_HPP

#include "oscalg/scalar.hpp"
#include "oscalg/small_matrix.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oscalg {

using Chart = std::vector<std::string>;

namespace detail {

template <Scalar T>
void require_positive_real(const T& omega, const char* who) {
  if constexpr (ScalarTraits<T>::exact) {
    if (!(omega.imag() == 0 && omega.real() > 0)) throw std::invalid_argument(std::string(who) + ": omega must be > 0");
  } else {
    if (!(omega.imag() == 0.0 && omega.real() > 0.0 && std::isfinite(omega.real())))
      throw std::invalid_argument(std::string(who) + ": omega must be > 0");
  }
}

inline std::size_t chart_index(const Chart& chart, std::string_view name) {
  const auto it = std::find(chart.begin(), chart.end(), name);
  if (it == chart.end()) throw std::invalid_argument("coordinate '" + std::string(name) + "' not in chart");
  return static_cast<std::size_t>(it - chart.begin());
}

}  // namespace detail

template <Scalar T>
class QuadraticLagrangian {
 public:
  using Matrix = SmallMatrix<T>;

  QuadraticLagrangian(Chart chart, Matrix K, Matrix C, Matrix V)
      : chart_(std::move(chart)), C_(std::move(C)) {
    const std::size_t n = chart_.size();
    for (const Matrix* m : {&K, &C_, &V})
      if (m->rows() != n || m->cols() != n)
        throw std::invalid_argument("QuadraticLagrangian: block dimension does not match chart length");
    K_ = K.symmetric_part();
    V_ = V.symmetric_part();
  }

  const Chart& chart() const { return chart_; }
  std::size_t size() const { return chart_.size(); }
  /// Velocity-velocity block (symmetric).
  const Matrix& K() const { return K_; }
  /// Velocity-coordinate block, coefficient of qdot^T C q.
  const Matrix& C() const { return C_; }
  /// Coordinate-coordinate block (symmetric).
  const Matrix& V() const { return V_; }

  /// Value of the Lagrangian at (q, qdot).
  T evaluate(const std::vector<T>& q, const std::vector<T>& qdot) const {
    const auto Kv = K_.apply(qdot);
    const auto Cq = C_.apply(q);
    const auto Vq = V_.apply(q);
    T out(0);
    for (std::size_t i = 0; i < size(); ++i) out += qdot[i] * Kv[i] / T(2) + qdot[i] * Cq[i] + q[i] * Vq[i] / T(2);
    return out;
  }

  QuadraticLagrangian with_chart(Chart chart) const {
    if (chart.size() != chart_.size()) throw std::invalid_argument("with_chart: length mismatch");
    return {std::move(chart), K_, C_, V_};
  }

  friend QuadraticLagrangian operator+(const QuadraticLagrangian& a, const QuadraticLagrangian& b) {
    if (a.chart_ != b.chart_) throw std::invalid_argument("QuadraticLagrangian: adding over different charts");
    return {a.chart_, a.K_ + b.K_, a.C_ + b.C_, a.V_ + b.V_};
  }

 private:
  Chart chart_;
  Matrix K_;
  Matrix C_;
  Matrix V_;
};

/// Euler-Lagrange content of a QuadraticLagrangian.
template <Scalar T>
struct ELNormalForm {
  Chart chart;
  SmallMatrix<T> K;
  SmallMatrix<T> C_a;
  SmallMatrix<T> V;

  friend bool operator==(const ELNormalForm& a, const ELNormalForm& b) {
    return a.chart == b.chart && a.K == b.K && a.C_a == b.C_a && a.V == b.V;
  }
};

template <Scalar T>
double max_abs_diff(const ELNormalForm<T>& a, const ELNormalForm<T>& b) {
  if (a.chart.size() != b.chart.size()) throw std::invalid_argument("normal forms over charts of different length");
  return std::max({max_abs_diff(a.K, b.K), max_abs_diff(a.C_a, b.C_a), max_abs_diff(a.V, b.V)});
}

template <Scalar T>
ELNormalForm<T> el_normal_form(const QuadraticLagrangian<T>& L) {
  return {L.chart(), L.K().symmetric_part(), L.C().antisymmetric_part(), L.V().symmetric_part()};
}

template <Scalar T>
QuadraticLagrangian<T> from_normal_form(const ELNormalForm<T>& nf) {
  return {nf.chart, nf.K, nf.C_a, nf.V};
}

/// q_source = sqrt(scale_sq) * R * q_target.
///
/// Irrational prefactors such as 1/sqrt(2) are carried squared so that
/// quadratic transforms stay rational in exact mode.
template <Scalar T>
struct LinearCoordinateMap {
  Chart source;
  Chart target;
  SmallMatrix<T> R;
  T scale_sq = T(1);

  LinearCoordinateMap inverse() const {
    return {target, source, R.inverse(), T(1) / scale_sq};
  }

  /// The map as a plain matrix (floating point only).
  SmallMatrix<Complex> matrix() const {
    return R.to_complex() * std::sqrt(ScalarTraits<T>::to_complex(scale_sq));
  }
};

template <Scalar T>
QuadraticLagrangian<T> apply_map(const QuadraticLagrangian<T>& L, const LinearCoordinateMap<T>& map) {
  if (map.source != L.chart()) throw std::invalid_argument("apply_map: source chart does not match the Lagrangian");
  if (!map.R.square() || map.R.rows() != map.target.size())
    throw std::invalid_argument("apply_map: map is not square over the target chart");
  (void)map.R.inverse();  // throws std::domain_error when singular
  if constexpr (ScalarTraits<T>::exact) {
    if (map.scale_sq.is_zero()) throw std::domain_error("apply_map: zero scale");
  } else {
    if (map.scale_sq == T(0)) throw std::domain_error("apply_map: zero scale");
  }
  const auto Rt = map.R.transpose();
  return {map.target, map.scale_sq * (Rt * L.K() * map.R), map.scale_sq * (Rt * L.C() * map.R),
          map.scale_sq * (Rt * L.V() * map.R)};
}

/// x = (x1 + x2)/sqrt 2, y = (x1 - x2)/sqrt 2.
template <Scalar T>
LinearCoordinateMap<T> hyperbolic_map() {
  return {{"x", "y"}, {"x1", "x2"}, {{T(1), T(1)}, {T(1), T(-1)}}, T(1) / T(2)};
}

/// Rotation q_source = Rot(theta) q_target on a two-dimensional chart.
inline LinearCoordinateMap<Complex> rotation_map(const Chart& chart, double theta) {
  if (chart.size() != 2) throw std::invalid_argument("rotation_map: chart must be two-dimensional");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {chart, chart, {{Complex(c), Complex(-s)}, {Complex(s), Complex(c)}}, Complex(1)};
}

/// Normal form restricted to `keep`, requiring every dropped coordinate to be
/// fully decoupled. Returns the restricted form and the largest dropped entry.
template <Scalar T>
std::pair<ELNormalForm<T>, double> restrict_chart(const ELNormalForm<T>& nf, const Chart& keep) {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
  for (const auto& name : keep) kept.push_back(detail::chart_index(nf.chart, name));
  for (std::size_t i = 0; i < nf.chart.size(); ++i)
    if (std::find(kept.begin(), kept.end(), i) == kept.end()) dropped.push_back(i);
  std::vector<std::size_t> all(nf.chart.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  double leak = 0.0;
  for (const auto* m : {&nf.K, &nf.C_a, &nf.V}) leak = std::max(leak, m->block(dropped, all).max_abs());
  ELNormalForm<T> out{keep, nf.K.block(kept, kept), nf.C_a.block(kept, kept), nf.V.block(kept, kept)};
  return {std::move(out), leak};
}

/// Solves the stationarity equations of the algebraic coordinates `aux` and
/// substitutes them back.
///
/// Aux velocities are removed first by integrating by parts, so the
/// precondition is checked on the normal form: aux coordinates may not carry
/// kinetic terms or aux-aux first-order terms.
template <Scalar T>
QuadraticLagrangian<T> eliminate_auxiliary(const QuadraticLagrangian<T>& L, const Chart& aux) {
  const auto nf = el_normal_form(L);
  const std::size_t n = L.size();
  std::vector<bool> is_aux(n, false);
  for (const auto& name : aux) is_aux[detail::chart_index(L.chart(), name)] = true;
  std::vector<std::size_t> A;
  std::vector<std::size_t> R;
  for (std::size_t i = 0; i < n; ++i) (is_aux[i] ? A : R).push_back(i);
  if (A.empty()) return L;

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (!nf.K.block(A, all).is_exactly_zero())
    throw std::invalid_argument("eliminate_auxiliary: auxiliary coordinate has a kinetic term");
  if (!nf.C_a.block(A, A).is_exactly_zero())
    throw std::invalid_argument("eliminate_auxiliary: auxiliary coordinates carry first-order velocity terms");

  // Representative without aux velocities: qdot_a C_aj q_j ~ -qdot_j C_aj q_a.
  SmallMatrix<T> C = nf.C_a;
  for (std::size_t a : A)
    for (std::size_t j : R) {
      C(j, a) = C(j, a) - C(a, j);
      C(a, j) = T(0);
    }

  // Quadratic form over u = (qdot_R, q_R) and the aux block q_A.
  const std::size_t r = R.size();
  const std::size_t m = A.size();
  SmallMatrix<T> Quu(2 * r, 2 * r);
  SmallMatrix<T> QuA(2 * r, m);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      Quu(i, j) = nf.K(R[i], R[j]);
      Quu(i, r + j) = C(R[i], R[j]);
      Quu(r + j, i) = C(R[i], R[j]);
      Quu(r + i, r + j) = nf.V(R[i], R[j]);
    }
    for (std::size_t k = 0; k < m; ++k) {
      QuA(i, k) = C(R[i], A[k]);
      QuA(r + i, k) = nf.V(R[i], A[k]);
    }
  }
  const SmallMatrix<T> QAA = nf.V.block(A, A);
  SmallMatrix<T> QAA_inv;
  try {
    QAA_inv = QAA.inverse();
  } catch (const std::domain_error&) {
    throw std::domain_error("eliminate_auxiliary: singular stationarity system");
  }
  const SmallMatrix<T> S = Quu - QuA * QAA_inv * QuA.transpose();

  Chart kept_chart;
  for (std::size_t i : R) kept_chart.push_back(L.chart()[i]);
  SmallMatrix<T> K2(r, r), C2(r, r), V2(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      K2(i, j) = S(i, j);
      C2(i, j) = S(i, r + j);
      V2(i, j) = S(r + i, r + j);
    }
  return {std::move(kept_chart), K2, C2, V2};
}

// ---------------------------------------------------------------------------
// Built-in Lagrangians

enum class LagrangianKind {
  direct_1d,
  indirect_2var,
  indirect_hyperbolic,
  bidimensional_direct,
  chiral_plus,
  chiral_minus,
  pseudochiral_plus,
  pseudochiral_minus,
};

inline constexpr std::array<std::pair<LagrangianKind, std::string_view>, 8> kLagrangianKindNames{{
    {LagrangianKind::direct_1d, "direct_1d"},
    {LagrangianKind::indirect_2var, "indirect_2var"},
    {LagrangianKind::indirect_hyperbolic, "indirect_hyperbolic"},
    {LagrangianKind::bidimensional_direct, "bidimensional_direct"},
    {LagrangianKind::chiral_plus, "chiral_plus"},
    {LagrangianKind::chiral_minus, "chiral_minus"},
    {LagrangianKind::pseudochiral_plus, "pseudochiral_plus"},
    {LagrangianKind::pseudochiral_minus, "pseudochiral_minus"},
}};

inline std::string_view to_string(LagrangianKind kind) {
  for (const auto& [k, name] : kLagrangianKindNames)
    if (k == kind) return name;
  throw std::invalid_argument("unknown LagrangianKind");
}

inline LagrangianKind parse_lagrangian_kind(std::string_view name) {
  for (const auto& [k, n] : kLagrangianKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown Lagrangian kind '" + std::string(name) + "'");
}

inline bool is_first_order(LagrangianKind kind) {
  return kind == LagrangianKind::chiral_plus || kind == LagrangianKind::chiral_minus ||
         kind == LagrangianKind::pseudochiral_plus || kind == LagrangianKind::pseudochiral_minus;
}

/// +1 for the plus modes, -1 for the minus modes, 0 otherwise.
inline int chirality(LagrangianKind kind) {
  switch (kind) {
    case LagrangianKind::chiral_plus:
    case LagrangianKind::pseudochiral_plus:
      return 1;
    case LagrangianKind::chiral_minus:
    case LagrangianKind::pseudochiral_minus:
      return -1;
    default:
      return 0;
  }
}

template <Scalar T>
QuadraticLagrangian<T> builtin_lagrangian(LagrangianKind kind, const T& omega) {
  detail::require_positive_real(omega, "builtin_lagrangian");
  using M = SmallMatrix<T>;
  const T w2 = omega * omega;
  const M eps = levi_civita<T>();
  const M g = minkowski_metric<T>();
  const M I2 = M::identity(2);
  switch (kind) {
    case LagrangianKind::direct_1d:
      return {{"x"}, M{{T(1)}}, M{{T(0)}}, M{{-w2}}};
    case LagrangianKind::indirect_2var: {
      const M swap = pauli_x<T>();
      return {{"x", "y"}, swap, M::zero(2), -w2 * swap};
    }
    case LagrangianKind::indirect_hyperbolic:
      return {{"x1", "x2"}, g, M::zero(2), -w2 * g};
    case LagrangianKind::bidimensional_direct:
      return {{"x1", "x2"}, I2, M::zero(2), -w2 * I2};
    case LagrangianKind::chiral_plus:
    case LagrangianKind::chiral_minus: {
      // +-omega eps_ij x_i xdot_j = qdot^T (+-omega eps^T) q
      const T s = T(chirality(kind));
      return {{"x1", "x2"}, M::zero(2), (s * omega) * eps.transpose(), T(-2) * w2 * I2};
    }
    case LagrangianKind::pseudochiral_plus:
    case LagrangianKind::pseudochiral_minus: {
      const T s = T(chirality(kind));
      return {{"x1", "x2"}, M::zero(2), (s * ScalarTraits<T>::i() * omega) * eps.transpose(), T(-2) * w2 * g};
    }
  }
  throw std::invalid_argument("builtin_lagrangian: unknown kind");
}

// ---------------------------------------------------------------------------
// Symmetries and gauge variations

/// First-order change of the normal form under q -> q + theta G q, reported
/// as theta times the largest coefficient change.
template <Scalar T>
double symmetry_variation(const QuadraticLagrangian<T>& L, const SmallMatrix<T>& G, double theta = 1.0) {
  if (!G.square() || G.rows() != L.size()) throw std::invalid_argument("symmetry_variation: generator dimension mismatch");
  const auto nf = el_normal_form(L);
  const auto Gt = G.transpose();
  const auto dK = (Gt * nf.K + nf.K * G).symmetric_part();
  const auto dC = (Gt * nf.C_a + nf.C_a * G).antisymmetric_part();
  const auto dV = (Gt * nf.V + nf.V * G).symmetric_part();
  return std::abs(theta) * std::max({dK.max_abs(), dC.max_abs(), dV.max_abs()});
}

/// Euler-Lagrange expression E(q) = -K qddot + (C^T - C) qdot + V q, as the
/// coefficient matrices of (qddot, qdot, q).
template <Scalar T>
struct EulerLagrangeOperator {
  SmallMatrix<T> acceleration;
  SmallMatrix<T> velocity;
  SmallMatrix<T> coordinate;
};

template <Scalar T>
EulerLagrangeOperator<T> euler_lagrange(const QuadraticLagrangian<T>& L) {
  return {-L.K(), L.C().transpose() - L.C(), L.V()};
}

/// Largest coefficient of T^T E(q): zero iff the Lagrangian is invariant, up
/// to a total derivative, under the local shift delta q = T Lambda(t).
template <Scalar T>
double gauge_variation_residual(const QuadraticLagrangian<T>& L, const SmallMatrix<T>& shift) {
  if (shift.rows() != L.size()) throw std::invalid_argument("gauge_variation_residual: shift dimension mismatch");
  const auto el = euler_lagrange(L);
  const auto St = shift.transpose();
  return std::max({(St * el.acceleration).max_abs(), (St * el.velocity).max_abs(), (St * el.coordinate).max_abs()});
}

template <Scalar T>
bool gauge_invariant_exactly(const QuadraticLagrangian<T>& L, const SmallMatrix<T>& shift) {
  const auto el = euler_lagrange(L);
  const auto St = shift.transpose();
  return (St * el.acceleration).is_exactly_zero() && (St * el.velocity).is_exactly_zero() &&
         (St * el.coordinate).is_exactly_zero();
}

// ---------------------------------------------------------------------------
// Soldering

enum class SolderKind { chiral_to_direct, pseudochiral_to_indirect };

inline std::string_view to_string(SolderKind kind) {
  return kind == SolderKind::chiral_to_direct ? "chiral_to_direct" : "pseudochiral_to_indirect";
}

inline SolderKind parse_solder_kind(std::string_view name) {
  if (name == "chiral_to_direct") return SolderKind::chiral_to_direct;
  if (name == "pseudochiral_to_indirect") return SolderKind::pseudochiral_to_indirect;
  throw std::invalid_argument("unknown solder kind '" + std::string(name) + "'");
}

inline std::pair<LagrangianKind, LagrangianKind> solder_pieces(SolderKind kind) {
  return kind == SolderKind::chiral_to_direct
             ? std::pair{LagrangianKind::chiral_plus, LagrangianKind::chiral_minus}
             : std::pair{LagrangianKind::pseudochiral_plus, LagrangianKind::pseudochiral_minus};
}

inline LagrangianKind solder_target(SolderKind kind) {
  return kind == SolderKind::chiral_to_direct ? LagrangianKind::bidimensional_direct
                                              : LagrangianKind::indirect_hyperbolic;
}

namespace detail {

/// Block-diagonal sum of Lagrangians over the concatenated chart.
template <Scalar T>
QuadraticLagrangian<T> direct_sum(const std::vector<QuadraticLagrangian<T>>& parts) {
  Chart chart;
  for (const auto& p : parts) chart.insert(chart.end(), p.chart().begin(), p.chart().end());
  const std::size_t n = chart.size();
  SmallMatrix<T> K(n, n), C(n, n), V(n, n);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) {
        K(off + i, off + j) = p.K()(i, j);
        C(off + i, off + j) = p.C()(i, j);
        V(off + i, off + j) = p.V()(i, j);
      }
    off += p.size();
  }
  return {std::move(chart), K, C, V};
}

}  // namespace detail

/// Composite and reduced Lagrangians of a soldering run plus the checks made
/// along the way.
template <Scalar T>
struct SolderResult {
  QuadraticLagrangian<T> composite;  // over y1 y2 z1 z2 B1 B2
  QuadraticLagrangian<T> reduced;    // over x1 x2, x = y - z
  /// Largest normal-form coefficient coupling to the centre coordinate s = y + z.
  double decoupling_residual = 0.0;
  /// Largest coefficient of the composite's variation under the gauge shift.
  double gauge_residual = 0.0;
  bool decoupled_exactly = false;
  bool gauge_invariant = false;
};

/// L_+(y) + L_-(z) - B . (J_+(y) + J_-(z)) + 1/2 B^T (V_+ + V_-) B.
///
/// The currents are the Euler-Lagrange expressions of the first-order pieces,
/// J(q) = (C^T - C) qdot + V q, so for the chiral pair the B^2 term is
/// -2 omega^2 B.B and for the pseudo-chiral pair -2 omega^2 g_ij B_i B_j.
template <Scalar T>
QuadraticLagrangian<T> soldering_composite(SolderKind kind, const T& omega) {
  const auto [plus_kind, minus_kind] = solder_pieces(kind);
  const auto Lp = builtin_lagrangian<T>(plus_kind, omega).with_chart({"y1", "y2"});
  const auto Lm = builtin_lagrangian<T>(minus_kind, omega).with_chart({"z1", "z2"});
  const auto zero2 = QuadraticLagrangian<T>({"B1", "B2"}, SmallMatrix<T>::zero(2), SmallMatrix<T>::zero(2),
                                            SmallMatrix<T>::zero(2));
  const auto sum = detail::direct_sum<T>({Lp, Lm, zero2});
  SmallMatrix<T> K = sum.K();
  SmallMatrix<T> C = sum.C();
  SmallMatrix<T> V = sum.V();
  const std::size_t b = 4;
  for (std::size_t piece = 0; piece < 2; ++piece) {
    const auto& L = piece == 0 ? Lp : Lm;
    const std::size_t off = 2 * piece;
    const auto jv = L.C().transpose() - L.C();  // current velocity coefficients
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        // -B_i jv_ij qdot_j  ->  C(qdot_j, B_i) += -jv_ij
        C(off + j, b + i) -= jv(i, j);
        // -B_i V_ij q_j
        V(b + i, off + j) -= L.V()(i, j);
        V(off + j, b + i) -= L.V()(i, j);
        V(b + i, b + j) += L.V()(i, j);
      }
  }
  return {sum.chart(), K, C, V};
}

/// The chiral composite with its coefficients written out literally:
/// L_+(y) + L_-(z) - B_i(J+_i(y) + J-_i(z)) - 2 omega^2 B_i B_i,
/// J+-_i(x) = 2(+-omega eps_ij xdot_j - omega^2 x_i).
template <Scalar T>
QuadraticLagrangian<T> chiral_composite_literal(const T& omega) {
  const auto eps = levi_civita<T>();
  const T w2 = omega * omega;
  const auto base = detail::direct_sum<T>(
      {builtin_lagrangian<T>(LagrangianKind::chiral_plus, omega).with_chart({"y1", "y2"}),
       builtin_lagrangian<T>(LagrangianKind::chiral_minus, omega).with_chart({"z1", "z2"}),
       QuadraticLagrangian<T>({"B1", "B2"}, SmallMatrix<T>::zero(2), SmallMatrix<T>::zero(2),
                              SmallMatrix<T>::zero(2))});
  SmallMatrix<T> C = base.C();
  SmallMatrix<T> V = base.V();
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      // -B_i * 2(+omega eps_ij ydot_j) and -B_i * 2(-omega eps_ij zdot_j)
      C(j, 4 + i) -= T(2) * omega * eps(i, j);
      C(2 + j, 4 + i) += T(2) * omega * eps(i, j);
    }
    // -B_i * 2(-omega^2 y_i) - B_i * 2(-omega^2 z_i), split symmetrically in V
    V(4 + i, i) += T(2) * w2;
    V(i, 4 + i) += T(2) * w2;
    V(4 + i, 2 + i) += T(2) * w2;
    V(2 + i, 4 + i) += T(2) * w2;
    // -2 omega^2 B_i B_i = 1/2 B^T (-4 omega^2) B
    V(4 + i, 4 + i) += T(-4) * w2;
  }
  return {base.chart(), base.K(), C, V};
}

/// Shift generator delta y = delta z = delta B = Lambda over y1 y2 z1 z2 B1 B2.
template <Scalar T>
SmallMatrix<T> soldering_shift() {
  SmallMatrix<T> t(6, 2);
  for (std::size_t blk = 0; blk < 3; ++blk)
    for (std::size_t i = 0; i < 2; ++i) t(2 * blk + i, i) = T(1);
  return t;
}

/// (y, z) = ((s + x)/2, (s - x)/2) with target chart x1 x2 s1 s2.
template <Scalar T>
LinearCoordinateMap<T> difference_map() {
  const T h = T(1) / T(2);
  return {{"y1", "y2", "z1", "z2"},
          {"x1", "x2", "s1", "s2"},
          {{h, T(0), h, T(0)}, {T(0), h, T(0), h}, {-h, T(0), h, T(0)}, {T(0), -h, T(0), h}},
          T(1)};
}

template <Scalar T>
SolderResult<T> solder(SolderKind kind, const T& omega) {
  detail::require_positive_real(omega, "solder");
  auto composite = soldering_composite<T>(kind, omega);
  const auto shift = soldering_shift<T>();
  const double gauge_residual = gauge_variation_residual(composite, shift);
  const bool gauge_exact = gauge_invariant_exactly(composite, shift);

  const auto no_B = eliminate_auxiliary(composite, {"B1", "B2"});
  const auto mapped = apply_map(no_B, difference_map<T>());
  const auto [nf_x, leak] = restrict_chart(el_normal_form(mapped), {"x1", "x2"});
  return {std::move(composite), from_normal_form(nf_x), leak, gauge_residual, leak == 0.0, gauge_exact};
}

/// The alternative route: substitute z = y - x into L_+(y) + L_-(z) and
/// eliminate y. Returns the Lagrangian in (y, x) before elimination and the
/// reduced Lagrangian in x.
template <Scalar T>
std::pair<QuadraticLagrangian<T>, QuadraticLagrangian<T>> solder_by_substitution(SolderKind kind, const T& omega) {
  const auto [plus_kind, minus_kind] = solder_pieces(kind);
  const auto sum = detail::direct_sum<T>({builtin_lagrangian<T>(plus_kind, omega).with_chart({"y1", "y2"}),
                                          builtin_lagrangian<T>(minus_kind, omega).with_chart({"z1", "z2"})});
  // (y, z) = (y, y - x) over target chart y1 y2 x1 x2
  const LinearCoordinateMap<T> sub{{"y1", "y2", "z1", "z2"},
                                   {"y1", "y2", "x1", "x2"},
                                   {{T(1), T(0), T(0), T(0)},
                                    {T(0), T(1), T(0), T(0)},
                                    {T(1), T(0), T(-1), T(0)},
                                    {T(0), T(1), T(0), T(-1)}},
                                   T(1)};
  auto in_yx = apply_map(sum, sub);
  auto reduced = eliminate_auxiliary(in_yx, {"y1", "y2"});
  return {std::move(in_yx), std::move(reduced)};
}

/// The (y, x) Lagrangian with the signs as usually printed:
///   -2 omega eps_ij y_i xdot_j - omega eps_ij x_i xdot_j
///   - 2 omega^2 (y.y - y.x + 1/2 x.x)
/// Kept for auditing; its cross term has the opposite sign to what the
/// substitution z = y - x produces.
template <Scalar T>
QuadraticLagrangian<T> substituted_literal(const T& omega) {
  const auto eps = levi_civita<T>();
  const T w2 = omega * omega;
  SmallMatrix<T> C(4, 4), V(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      // eps_ij a_i bdot_j = bdot_j eps_ij a_i  ->  C(b_j, a_i) += eps_ij
      C(2 + j, i) += T(-2) * omega * eps(i, j);
      C(2 + j, 2 + i) += -omega * eps(i, j);
    }
  for (std::size_t i = 0; i < 2; ++i) {
    V(i, i) += T(-4) * w2;
    V(i, 2 + i) += T(2) * w2;
    V(2 + i, i) += T(2) * w2;
    V(2 + i, 2 + i) += T(-2) * w2;
  }
  return {{"y1", "y2", "x1", "x2"}, SmallMatrix<T>::zero(4), C, V};
}

// ---------------------------------------------------------------------------
// Gauge currents

/// Chiral-oscillator configuration for the currents check: y, ydot, z, zdot.
struct SolderingState {
  std::array<Complex, 2> y{};
  std::array<Complex, 2> ydot{};
  std::array<Complex, 2> z{};
  std::array<Complex, 2> zdot{};
};

struct CurrentCheck {
  Complex delta_L;
  Complex current_contraction;
};

/// First-order change of L_+(y) + L_-(z) under delta y = delta z = Lambda,
/// modulo total derivatives, computed two ways: from the Lagrangian blocks
/// (directional derivative in q minus Lambda . d/dt(dL/dqdot)) and from the
/// closed-form currents J+-_i(x) = 2(+-k omega eps_ij xdot_j - omega^2 g_ij x_j),
/// with k = 1, g = delta for the chiral pair and k = i, g = diag(1, -1) for the
/// pseudo-chiral pair.
inline CurrentCheck soldering_currents(SolderKind kind, double omega, const SolderingState& state,
                                       const std::array<Complex, 2>& lambda) {
  const Complex w(omega);
  detail::require_positive_real(w, "soldering_currents");
  const auto [plus_kind, minus_kind] = solder_pieces(kind);
  const auto Lp = builtin_lagrangian<Complex>(plus_kind, w);
  const auto Lm = builtin_lagrangian<Complex>(minus_kind, w);
  const std::vector<Complex> lam{lambda[0], lambda[1]};

  auto block_route = [&](const QuadraticLagrangian<Complex>& L, const std::array<Complex, 2>& q,
                         const std::array<Complex, 2>& qdot) {
    if (!L.K().is_exactly_zero()) throw std::invalid_argument("soldering_currents: pieces must be first order");
    const std::vector<Complex> qv{q[0], q[1]};
    const std::vector<Complex> vv{qdot[0], qdot[1]};
    std::vector<Complex> up = qv;
    std::vector<Complex> down = qv;
    for (std::size_t i = 0; i < 2; ++i) {
      up[i] += lam[i];
      down[i] -= lam[i];
    }
    // exact for a quadratic form
    const Complex directional = (L.evaluate(up, vv) - L.evaluate(down, vv)) / 2.0;
    const auto pdot = L.C().apply(vv);
    return directional - (lam[0] * pdot[0] + lam[1] * pdot[1]);
  };
  const Complex delta_L = block_route(Lp, state.y, state.ydot) + block_route(Lm, state.z, state.zdot);

  const bool pseudo = kind == SolderKind::pseudochiral_to_indirect;
  const Complex k = pseudo ? Complex(0.0, 1.0) : Complex(1.0);
  const double g[2] = {1.0, pseudo ? -1.0 : 1.0};
  auto current = [&](double sign, const std::array<Complex, 2>& x, const std::array<Complex, 2>& xdot, std::size_t i) {
    // eps_i0 xdot_0 + eps_i1 xdot_1 with eps_01 = 1, eps_10 = -1
    const Complex eps_xdot = i == 0 ? xdot[1] : -xdot[0];
    return 2.0 * (sign * k * omega * eps_xdot - omega * omega * g[i] * x[i]);
  };
  Complex contraction(0.0);
  for (std::size_t i = 0; i < 2; ++i)
    contraction += lambda[i] * (current(+1.0, state.y, state.ydot, i) + current(-1.0, state.z, state.zdot, i));
  return {delta_L, contraction};
}

// ---------------------------------------------------------------------------
// JSON: {chart: [names], K: [[...]], C: [[...]], V: [[...]]}, entries [re, im]

template <Scalar T>
nlohmann::ordered_json to_json(const QuadraticLagrangian<T>& L) {
  auto block = [](const SmallMatrix<T>& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const Complex z = ScalarTraits<T>::to_complex(m(r, c));
        row.push_back({z.real(), z.imag()});
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::ordered_json j;
  j["chart"] = L.chart();
  j["K"] = block(L.K());
  j["C"] = block(L.C());
  j["V"] = block(L.V());
  return j;
}

inline QuadraticLagrangian<Complex> lagrangian_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("chart")) throw std::invalid_argument("Lagrangian JSON: missing 'chart'");
  const auto chart = j.at("chart").get<Chart>();
  const std::size_t n = chart.size();
  auto block = [&](const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("Lagrangian JSON: missing '") + key + "'");
    const auto& rows = j.at(key);
    if (!rows.is_array() || rows.size() != n)
      throw std::invalid_argument(std::string("Lagrangian JSON: block '") + key + "' has wrong row count");
    SmallMatrix<Complex> m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      if (!rows[r].is_array() || rows[r].size() != n)
        throw std::invalid_argument(std::string("Lagrangian JSON: block '") + key + "' has wrong column count");
      for (std::size_t c = 0; c < n; ++c) {
        const auto& e = rows[r][c];
        if (e.is_number()) {
          m(r, c) = Complex(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2) {
          m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
          throw std::invalid_argument("Lagrangian JSON: entries must be [re, im]");
        }
      }
    }
    return m;
  };
  return {chart, block("K"), block("C"), block("V")};
}

}  // namespace oscalg

#endif  // OSCALG_LAGRANGIAN_HPP
