#include "oscalg/dynamics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace oscalg;
using E = ExactComplex;

namespace {

E rat(int num, int den = 1) { return E(Rational(num) / den); }

constexpr LagrangianKind kFirstOrder[] = {LagrangianKind::chiral_plus, LagrangianKind::chiral_minus,
                                          LagrangianKind::pseudochiral_plus, LagrangianKind::pseudochiral_minus};
constexpr LagrangianKind kSecondOrder[] = {LagrangianKind::direct_1d, LagrangianKind::indirect_2var,
                                           LagrangianKind::indirect_hyperbolic, LagrangianKind::bidimensional_direct};

}  // namespace

TEST_CASE("Legendre transform of the one-dimensional oscillator") {
  const E w = rat(3, 2);
  const auto h = legendre(builtin_lagrangian<E>(LagrangianKind::direct_1d, w));
  CHECK(h.labels == Labels{"x", "p_x"});
  CHECK(h.H == SmallMatrix<E>{{w * w, E(0)}, {E(0), E(1)}});
  CHECK(h.poisson == canonical_poisson<E>(1));
}

TEST_CASE("Legendre transform of the chiral oscillators") {
  const E w = rat(5, 7);
  for (const auto k : {LagrangianKind::chiral_plus, LagrangianKind::chiral_minus}) {
    const auto h = legendre(builtin_lagrangian<E>(k, w));
    CHECK(h.labels == Labels{"x1", "x2"});
    // H = omega^2 (x1^2 + x2^2)
    CHECK(h.H == E(2) * w * w * SmallMatrix<E>::identity(2));
    // {x1, x2} = -+1/(2 omega)
    CHECK(h.poisson(0, 1) == E(-chirality(k)) / (E(2) * w));
    CHECK(h.poisson(1, 0) == E(chirality(k)) / (E(2) * w));
  }
}

TEST_CASE("first-order flows reproduce the Euler-Lagrange equations") {
  // E(q) = (C^T - C) qdot + V q = 0  =>  qdot = -(C^T - C)^-1 V q
  for (const auto k : kFirstOrder) {
    const auto L = builtin_lagrangian<E>(k, rat(2, 3));
    const auto el = euler_lagrange(L);
    const auto expected = -(el.velocity.inverse() * el.coordinate);
    CHECK(legendre(L).flow_generator() == expected);
  }
}

TEST_CASE("second-order flows reproduce the Euler-Lagrange equations") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (const auto k : kSecondOrder) {
    const auto L = builtin_lagrangian<Complex>(k, Complex(1.1));
    const auto h = legendre(L);
    const auto A = h.flow_generator();
    const auto A2 = A * A;
    const std::size_t n = L.size();
    const auto el = euler_lagrange(L);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Complex> z(2 * n);
      for (auto& v : z) v = Complex(g(rng), g(rng));
      const auto zdot = A.apply(z);
      const auto zddot = A2.apply(z);
      const std::vector<Complex> q(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
      const std::vector<Complex> qd(zdot.begin(), zdot.begin() + static_cast<std::ptrdiff_t>(n));
      const std::vector<Complex> qdd(zddot.begin(), zddot.begin() + static_cast<std::ptrdiff_t>(n));
      const auto a = el.acceleration.apply(qdd);
      const auto b = el.velocity.apply(qd);
      const auto c = el.coordinate.apply(q);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] + b[i] + c[i]) < 1e-12);
    }
  }
}

TEST_CASE("degenerate Lagrangians are rejected") {
  const QuadraticLagrangian<E> L({"x1", "x2"}, SmallMatrix<E>(2, 2), SmallMatrix<E>(2, 2), SmallMatrix<E>::identity(2));
  CHECK_THROWS_AS(legendre(L), std::invalid_argument);
  const QuadraticLagrangian<E> mixed({"x1", "x2"}, SmallMatrix<E>{{E(1), E(0)}, {E(0), E(0)}}, SmallMatrix<E>(2, 2),
                                     SmallMatrix<E>::identity(2));
  CHECK_THROWS_AS(legendre(mixed), std::invalid_argument);
}

TEST_CASE("chiral chart to oscillator phase space") {
  const E w = rat(7, 4);
  const auto h = legendre(builtin_lagrangian<E>(LagrangianKind::chiral_plus, w));
  const auto map = chiral_to_canonical_map<E>(w);
  CHECK(is_canonical(map, h.poisson, canonical_poisson<E>(1)));
  const auto osc = transform_hamiltonian(h, map, canonical_poisson<E>(1));
  CHECK(osc.H == legendre(builtin_lagrangian<E>(LagrangianKind::direct_1d, w)).H);
  // the minus mode needs the mirrored map
  const auto hm = legendre(builtin_lagrangian<E>(LagrangianKind::chiral_minus, w));
  CHECK_FALSE(is_canonical(map, hm.poisson, canonical_poisson<E>(1)));
  CHECK_THROWS_AS(transform_hamiltonian(hm, map, canonical_poisson<E>(1)), std::invalid_argument);
}

TEST_CASE("complex split maps") {
  const E w = rat(2, 3);
  const auto back = complex_split_map<E>(w);
  const auto fwd = complex_split_forward<E>(w);
  CHECK(is_canonical(back, canonical_poisson<E>(2), canonical_poisson<E>(2)));
  CHECK(is_canonical(fwd, canonical_poisson<E>(2), canonical_poisson<E>(2)));
  // z = sqrt(s_b) R_b sqrt(s_f) R_f z
  CHECK(back.scale_sq * fwd.scale_sq * (back.R * fwd.R) * (back.R * fwd.R) == SmallMatrix<E>::identity(4));
  CHECK(fwd.scale_sq * back.scale_sq == rat(1, 4));
  CHECK(back.R * fwd.R == E(2) * SmallMatrix<E>::identity(4));

  const auto hI = legendre(builtin_lagrangian<E>(LagrangianKind::indirect_hyperbolic, w));
  const auto split = transform_hamiltonian(hI, back, canonical_poisson<E>(2));
  for (std::size_t r : {0, 2})
    for (std::size_t c : {1, 3}) CHECK(split.H(r, c).is_zero());
  CHECK(split.H(0, 0) == w * w);
  CHECK(split.H(2, 2) == E(1));
}

TEST_CASE("a non-canonical scaling is detected") {
  const LinearCanonicalMap<E> m{{"x", "p_x"}, {"x", "p_x"}, SmallMatrix<E>::identity(2), E(2)};
  CHECK_FALSE(is_canonical(m, canonical_poisson<E>(1), canonical_poisson<E>(1)));
  CHECK(canonical_residual(m, canonical_poisson<E>(1), canonical_poisson<E>(1)) == 1.0);
}

TEST_CASE("integration matches the closed-form oscillator") {
  const double w = 1.7;
  const auto h = legendre(builtin_lagrangian<Complex>(LagrangianKind::direct_1d, Complex(w)));
  const double x0 = 0.4;
  const double p0 = -1.1;
  const auto traj = integrate(h, h.state({x0, p0}), 10.0, 0.25);
  REQUIRE(traj.times.size() == 41);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    CHECK(std::abs(traj.states[k][0] - (x0 * std::cos(w * t) + p0 / w * std::sin(w * t))) < 1e-12);
    CHECK(std::abs(traj.states[k][1] - (p0 * std::cos(w * t) - x0 * w * std::sin(w * t))) < 1e-12);
  }
  CHECK_THROWS_AS(integrate(h, h.state({x0, p0}), 1.0, 0.0), std::invalid_argument);
  const auto other = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_plus, Complex(w)));
  CHECK_THROWS_AS(integrate(h, other.state({1.0, 0.0}), 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("chiral modes rotate rigidly in opposite senses") {
  const double w = 0.9;
  const auto hp = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_plus, Complex(w)));
  const auto hm = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_minus, Complex(w)));
  const std::vector<Complex> z0{0.6, -0.3};
  const auto tp = integrate(hp, hp.state(z0), 5.0, 0.5);
  const auto tm = integrate(hm, hm.state(z0), 5.0, 0.5);
  for (std::size_t k = 0; k < tp.times.size(); ++k) {
    const double t = tp.times[k];
    // plus: rotation by +omega t
    const Complex x1 = z0[0] * std::cos(w * t) - z0[1] * std::sin(w * t);
    const Complex x2 = z0[0] * std::sin(w * t) + z0[1] * std::cos(w * t);
    CHECK(std::abs(tp.states[k][0] - x1) < 1e-12);
    CHECK(std::abs(tp.states[k][1] - x2) < 1e-12);
    // minus: rotation by -omega t
    CHECK(std::abs(tm.states[k][0] - (z0[0] * std::cos(w * t) + z0[1] * std::sin(w * t))) < 1e-12);
    CHECK(std::abs(tm.states[k][1] - (-z0[0] * std::sin(w * t) + z0[1] * std::cos(w * t))) < 1e-12);
  }
  const Complex ap = signed_area_rate(hp, z0);
  const Complex am = signed_area_rate(hm, z0);
  CHECK(ap.real() > 0);
  CHECK(std::abs(ap + am) < 1e-15);
  CHECK(std::abs(ap - w * (z0[0] * z0[0] + z0[1] * z0[1])) < 1e-15);
}

TEST_CASE("Noether charges are proportional to the energy") {
  // p = C x gives eps x.p = s omega |x|^2 and, after the -i, s omega (x1^2 - x2^2)
  const double w = 1.3;
  const std::vector<Complex> z{Complex(0.2, 0.1), Complex(-0.7, 0.3)};
  for (const auto k : kFirstOrder) {
    const auto h = legendre(builtin_lagrangian<Complex>(k, Complex(w)));
    const bool chiral = k == LagrangianKind::chiral_plus || k == LagrangianKind::chiral_minus;
    const auto q = noether_charge(chiral ? ChargeKind::angular_momentum : ChargeKind::su11_charge, k, h.state(z), w);
    CHECK(std::abs(q - static_cast<double>(chirality(k)) * h.value(z) / w) < 1e-14);
  }
  const auto h = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_plus, Complex(w)));
  CHECK_THROWS_AS(noether_charge(ChargeKind::su11_charge, LagrangianKind::chiral_plus, h.state(z), w),
                  std::invalid_argument);
}

TEST_CASE("energy and charges are conserved over 100 periods") {
  const double w = 1.0;
  for (const auto k : kFirstOrder) {
    const auto h = legendre(builtin_lagrangian<Complex>(k, Complex(w)));
    const double period = 2 * std::numbers::pi / w;
    const auto traj = integrate(h, h.state({1.0, 0.5}), 100 * period, period / 16);
    const auto s = conservation_series(h, traj, k, w);
    CHECK(s.max_energy_drift < 1e-10);
    CHECK(s.max_charge_drift < 1e-10);
    CHECK(s.series.size() == traj.times.size());
    CHECK(s.series[0].contains("signed_area_rate"));
  }
  for (const auto k : kSecondOrder) {
    const auto h = legendre(builtin_lagrangian<Complex>(k, Complex(w)));
    std::vector<Complex> z0(h.labels.size(), Complex(0.3));
    z0[0] = 1.0;
    const auto traj = integrate(h, h.state(z0), 100 * 2 * std::numbers::pi, 0.5);
    CHECK(conservation_series(h, traj, k, w).max_energy_drift < 1e-10);
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto h = legendre(builtin_lagrangian<Complex>(LagrangianKind::pseudochiral_plus, Complex(1.0)));
  const auto traj = integrate(h, h.state({1.0, 0.0}), 1.0, 0.5);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,re(x1),im(x1),re(x2),im(x2)");
  std::getline(is, line);
  CHECK(line == "0,1,0,0,0");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("phase states validate their pairing") {
  CHECK_THROWS_AS(PhaseState({"x"}, {1.0}, SmallMatrix<Complex>(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(PhaseState({"x", "p"}, {1.0, 0.0}, SmallMatrix<Complex>::identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(PhaseState({"x", "p"}, {1.0, 0.0}, SmallMatrix<Complex>(2, 2)), std::domain_error);
  CHECK_NOTHROW(PhaseState({"x", "p"}, {1.0, 0.0}, canonical_poisson<Complex>(1)));
}
