// Classical phase-space layer: Legendre transforms, symplectic pairings,
// linear canonical maps, exact linear flows and Noether charges.
//
// Brackets are {f, g} = grad f^T Omega grad g and Hamilton's equations read
// zdot = Omega grad H. A quadratic Hamiltonian has value 1/2 z^T H z, taken
// bilinearly so that complex phase variables are handled without conjugation.

#ifndef OSCALG_DYNAMICS_HPP
#define OSCALG_DYNAMICS_HPP

#include "oscalg/lagrangian.hpp"
#include "oscalg/scalar.hpp"
#include "oscalg/small_matrix.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscalg {

using Labels = std::vector<std::string>;

/// [[0, I], [-I, 0]] over (q, p).
template <Scalar T>
SmallMatrix<T> canonical_poisson(std::size_t n_dof) {
  SmallMatrix<T> m(2 * n_dof, 2 * n_dof);
  for (std::size_t i = 0; i < n_dof; ++i) {
    m(i, n_dof + i) = T(1);
    m(n_dof + i, i) = T(-1);
  }
  return m;
}

struct PhaseState {
  Labels labels;
  std::vector<Complex> values;
  SmallMatrix<Complex> pairing;

  PhaseState(Labels l, std::vector<Complex> v, SmallMatrix<Complex> omega)
      : labels(std::move(l)), values(std::move(v)), pairing(std::move(omega)) {
    if (labels.size() != values.size()) throw std::invalid_argument("PhaseState: labels and values differ in length");
    if (values.size() % 2 != 0) throw std::invalid_argument("PhaseState: odd phase-space dimension");
    if (!pairing.square() || pairing.rows() != values.size())
      throw std::invalid_argument("PhaseState: pairing dimension mismatch");
    if ((pairing + pairing.transpose()).max_abs() > 1e-14 * std::max(1.0, pairing.max_abs()))
      throw std::invalid_argument("PhaseState: pairing is not antisymmetric");
    (void)pairing.inverse();
  }
};

template <Scalar T>
struct QuadraticHamiltonian {
  Labels labels;
  SmallMatrix<T> H;        // value 1/2 z^T H z
  SmallMatrix<T> poisson;  // Omega

  QuadraticHamiltonian(Labels l, SmallMatrix<T> h, SmallMatrix<T> omega)
      : labels(std::move(l)), H(h.symmetric_part()), poisson(std::move(omega)) {
    if (H.rows() != labels.size() || poisson.rows() != labels.size() || !poisson.square())
      throw std::invalid_argument("QuadraticHamiltonian: dimension mismatch");
  }

  T value(const std::vector<T>& z) const {
    const auto Hz = H.apply(z);
    T out(0);
    for (std::size_t i = 0; i < z.size(); ++i) out += z[i] * Hz[i];
    return out / T(2);
  }

  /// Generator A of the linear flow zdot = A z.
  SmallMatrix<T> flow_generator() const { return poisson * H; }

  PhaseState state(std::vector<Complex> values) const {
    return {labels, std::move(values), poisson.to_complex()};
  }
};

/// Legendre transform of a quadratic Lagrangian.
///
/// Second-order case (K invertible): z = (q, p) with the canonical pairing.
/// First-order case (K = 0, antisymmetric velocity block C_a invertible): the
/// chart itself is the phase space, Omega = -(2 C_a)^-1, H = -1/2 q^T V q.
template <Scalar T>
QuadraticHamiltonian<T> legendre(const QuadraticLagrangian<T>& L) {
  const auto nf = el_normal_form(L);
  const std::size_t n = L.size();
  if (nf.K.is_exactly_zero()) {
    SmallMatrix<T> two_ca = T(2) * nf.C_a;
    SmallMatrix<T> inv;
    try {
      inv = two_ca.inverse();
    } catch (const std::domain_error&) {
      throw std::invalid_argument("legendre: first-order Lagrangian with degenerate symplectic block");
    }
    return {L.chart(), -nf.V, -inv};
  }
  SmallMatrix<T> Kinv;
  try {
    Kinv = nf.K.inverse();
  } catch (const std::domain_error&) {
    throw std::invalid_argument("legendre: K is singular but not zero (mixed degenerate case unsupported)");
  }
  const auto& Ca = nf.C_a;
  const auto Hqq = Ca.transpose() * Kinv * Ca - nf.V;
  const auto Hpq = -(Kinv * Ca);
  SmallMatrix<T> H(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      H(i, j) = Hqq(i, j);
      H(n + i, n + j) = Kinv(i, j);
      H(n + i, j) = Hpq(i, j);
      H(j, n + i) = Hpq(i, j);
    }
  Labels labels = L.chart();
  for (const auto& q : L.chart()) labels.push_back("p" + (q.size() > 1 && q[0] == 'x' ? q.substr(1) : "_" + q));
  return {std::move(labels), H, canonical_poisson<T>(n)};
}

/// z_source = sqrt(scale_sq) * R * z_target.
template <Scalar T>
struct LinearCanonicalMap {
  Labels source;
  Labels target;
  SmallMatrix<T> R;
  T scale_sq = T(1);
};

/// Largest entry of M Omega_target M^T - Omega_source, i.e. how far the map
/// is from carrying the target brackets onto the source brackets.
template <Scalar T>
double canonical_residual(const LinearCanonicalMap<T>& map, const SmallMatrix<T>& source_poisson,
                          const SmallMatrix<T>& target_poisson) {
  if (map.R.rows() != source_poisson.rows() || map.R.cols() != target_poisson.rows())
    throw std::invalid_argument("is_canonical: dimension mismatch");
  return (map.scale_sq * (map.R * target_poisson * map.R.transpose()) - source_poisson).max_abs();
}

template <Scalar T>
bool is_canonical(const LinearCanonicalMap<T>& map, const SmallMatrix<T>& source_poisson,
                  const SmallMatrix<T>& target_poisson) {
  if (map.R.rows() != source_poisson.rows() || map.R.cols() != target_poisson.rows())
    throw std::invalid_argument("is_canonical: dimension mismatch");
  if constexpr (ScalarTraits<T>::exact) {
    return map.scale_sq * (map.R * target_poisson * map.R.transpose()) == source_poisson;
  } else {
    return canonical_residual(map, source_poisson, target_poisson) < 1e-12;
  }
}

/// H' = M^T H M, with the target pairing. Throws unless the map is canonical.
template <Scalar T>
QuadraticHamiltonian<T> transform_hamiltonian(const QuadraticHamiltonian<T>& h, const LinearCanonicalMap<T>& map,
                                              const SmallMatrix<T>& target_poisson) {
  if (map.source != h.labels) throw std::invalid_argument("transform_hamiltonian: source labels do not match");
  if (!is_canonical(map, h.poisson, target_poisson))
    throw std::invalid_argument("transform_hamiltonian: map is not canonical");
  return {map.target, map.scale_sq * (map.R.transpose() * h.H * map.R), target_poisson};
}

/// x1 = p_x/(sqrt2 omega), x2 = x/sqrt2, from the chiral chart to (x, p_x).
template <Scalar T>
LinearCanonicalMap<T> chiral_to_canonical_map(const T& omega) {
  return {{"x1", "x2"}, {"x", "p_x"}, {{T(0), T(1) / omega}, {T(1), T(0)}}, T(1) / T(2)};
}

/// Inverse of x+- = (x1 +- i p2/omega)/sqrt2, p+- = (p1 +- i omega x2)/sqrt2,
/// i.e. (x1, x2, p1, p2) in terms of (x+, x-, p+, p-).
template <Scalar T>
LinearCanonicalMap<T> complex_split_map(const T& omega) {
  const T i = ScalarTraits<T>::i();
  const T zero(0);
  const T one(1);
  return {{"x1", "x2", "p1", "p2"},
          {"x+", "x-", "p+", "p-"},
          {{one, one, zero, zero},
           {zero, zero, -i / omega, i / omega},
           {zero, zero, one, one},
           {-i * omega, i * omega, zero, zero}},
          T(1) / T(2)};
}

/// (x+, x-, p+, p-) in terms of (x1, x2, p1, p2), written as printed.
template <Scalar T>
LinearCanonicalMap<T> complex_split_forward(const T& omega) {
  const T i = ScalarTraits<T>::i();
  const T zero(0);
  const T one(1);
  return {{"x+", "x-", "p+", "p-"},
          {"x1", "x2", "p1", "p2"},
          {{one, zero, zero, i / omega},
           {one, zero, zero, -i / omega},
           {zero, i * omega, one, zero},
           {zero, -i * omega, one, zero}},
          T(1) / T(2)};
}

// ---------------------------------------------------------------------------
// Trajectories

struct Trajectory {
  Labels labels;
  std::vector<double> times;
  std::vector<std::vector<Complex>> states;
};

/// Samples z(k dt) = exp(A k dt) z0 for k = 0 .. floor(t_final/dt).
inline Trajectory integrate(const QuadraticHamiltonian<Complex>& h, const PhaseState& z0, double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("integrate: t_final must be non-negative");
  if (z0.labels != h.labels) throw std::invalid_argument("integrate: state labels do not match the Hamiltonian");
  const auto n = static_cast<Eigen::Index>(h.labels.size());
  const auto gen = h.flow_generator();
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) A(r, c) = gen(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::VectorXcd z(n);
  for (Eigen::Index r = 0; r < n; ++r) z(r) = z0.values[static_cast<std::size_t>(r)];

  const auto steps = static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
  Trajectory out{h.labels, {}, {}};
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Eigen::MatrixXcd flow = (A * Complex(t)).exp();
    const Eigen::VectorXcd zt = flow * z;
    out.times.push_back(t);
    out.states.emplace_back(zt.data(), zt.data() + n);
  }
  return out;
}

/// eps_ij x_i xdot_j for the first two coordinates of z.
inline Complex signed_area_rate(const QuadraticHamiltonian<Complex>& h, const std::vector<Complex>& z) {
  const auto zdot = h.flow_generator().apply(z);
  return z[0] * zdot[1] - z[1] * zdot[0];
}

enum class ChargeKind { angular_momentum, su11_charge };

inline std::string_view to_string(ChargeKind kind) {
  return kind == ChargeKind::angular_momentum ? "angular_momentum" : "su11_charge";
}

/// Noether charge of a chiral or pseudo-chiral mode at chart point z = (x1, x2).
///
/// The momentum is read from the mode's Lagrangian, p = dL/dxdot = C x. The
/// rotation charge is eps_ij x_i p_j. For the sigma-boost the bare Noether
/// combination sigma_ij x_i p_j equals i times +-H~/omega; it is returned
/// rescaled by -i so the charge comes out as +-omega (x1^2 - x2^2).
inline Complex noether_charge(ChargeKind kind, LagrangianKind mode, const PhaseState& z, double omega) {
  if (z.labels != Labels{"x1", "x2"}) throw std::invalid_argument("noether_charge: state must live on the (x1, x2) chart");
  const bool chiral = mode == LagrangianKind::chiral_plus || mode == LagrangianKind::chiral_minus;
  const bool pseudo = mode == LagrangianKind::pseudochiral_plus || mode == LagrangianKind::pseudochiral_minus;
  if (kind == ChargeKind::angular_momentum && !chiral)
    throw std::invalid_argument("noether_charge: angular momentum needs a chiral mode");
  if (kind == ChargeKind::su11_charge && !pseudo)
    throw std::invalid_argument("noether_charge: SU(1,1) charge needs a pseudo-chiral mode");
  const auto L = builtin_lagrangian<Complex>(mode, Complex(omega));
  const auto p = L.C().apply(z.values);
  const auto& x = z.values;
  if (kind == ChargeKind::angular_momentum) return x[0] * p[1] - x[1] * p[0];
  const Complex bare = x[0] * p[1] + x[1] * p[0];
  return Complex(0.0, -1.0) * bare;
}

// ---------------------------------------------------------------------------
// Export

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// CSV with header `t,re(q1),im(q1),...`.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (const auto& l : traj.labels) os << ",re(" << l << "),im(" << l << ")";
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << detail::format_double(traj.times[k]);
    for (const auto& v : traj.states[k]) os << "," << detail::format_double(v.real()) << "," << detail::format_double(v.imag());
    os << "\n";
  }
}

struct ConservationSummary {
  double max_energy_drift = 0.0;
  double max_charge_drift = 0.0;
  nlohmann::ordered_json series;
};

/// Energy, charge and signed area rate along a trajectory of a chiral or
/// pseudo-chiral mode (charge omitted for other systems).
inline ConservationSummary conservation_series(const QuadraticHamiltonian<Complex>& h, const Trajectory& traj,
                                               LagrangianKind mode, double omega) {
  ConservationSummary out;
  out.series = nlohmann::ordered_json::array();
  const bool has_charge = is_first_order(mode);
  const ChargeKind ck = (mode == LagrangianKind::chiral_plus || mode == LagrangianKind::chiral_minus)
                            ? ChargeKind::angular_momentum
                            : ChargeKind::su11_charge;
  Complex e0(0.0);
  Complex q0(0.0);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& z = traj.states[k];
    const Complex e = h.value(z);
    nlohmann::ordered_json row;
    row["t"] = traj.times[k];
    row["energy"] = {e.real(), e.imag()};
    if (k == 0) e0 = e;
    out.max_energy_drift = std::max(out.max_energy_drift, std::abs(e - e0));
    if (has_charge) {
      const Complex q = noether_charge(ck, mode, PhaseState(traj.labels, z, h.poisson), omega);
      if (k == 0) q0 = q;
      out.max_charge_drift = std::max(out.max_charge_drift, std::abs(q - q0));
      row["charge"] = {q.real(), q.imag()};
    }
    if (traj.labels.size() >= 2 && traj.labels[0] == "x1" && traj.labels[1] == "x2") {
      const Complex a = signed_area_rate(h, z);
      row["signed_area_rate"] = {a.real(), a.imag()};
    }
    out.series.push_back(std::move(row));
  }
  return out;
}

}  // namespace oscalg

#endif  // OSCALG_DYNAMICS_HPP
