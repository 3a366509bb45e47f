#include "oscalg/scalar.hpp"
#include "oscalg/small_matrix.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace oscalg;
using Catch::Approx;

TEST_CASE("parse_rational accepts integers, fractions and decimals") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-3/2") == Rational(-3) / 2);
  CHECK(parse_rational("0.25") == Rational(1) / 4);
  CHECK(parse_rational("1e-3") == Rational(1) / 1000);
  CHECK(parse_rational("2.5E2") == Rational(250));
  CHECK_THROWS(parse_rational(""));
  CHECK_THROWS(parse_rational("pi"));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("1.5x"));
}

TEST_CASE("ExactComplex arithmetic") {
  const ExactComplex i = ExactComplex::i();
  CHECK(i * i == ExactComplex(-1));
  const ExactComplex z(Rational(3), Rational(4));
  CHECK(z * z.conj() == ExactComplex(25));
  CHECK((z / z) == ExactComplex(1));
  CHECK(ExactComplex(1) / ExactComplex(3) * ExactComplex(3) == ExactComplex(1));
  CHECK_THROWS_AS(z / ExactComplex(0), std::domain_error);
  CHECK(z.to_complex() == Complex(3.0, 4.0));
}

TEST_CASE("exact inverse of random rational matrices") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-5, 5);
  int inverted = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SmallMatrix<ExactComplex> m(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) m(r, c) = ExactComplex(Rational(d(rng)) / 3, Rational(d(rng)));
    try {
      const auto inv = m.inverse();
      CHECK(m * inv == SmallMatrix<ExactComplex>::identity(4));
      CHECK(inv * m == SmallMatrix<ExactComplex>::identity(4));
      ++inverted;
    } catch (const std::domain_error&) {
    }
  }
  CHECK(inverted > 40);
}

TEST_CASE("singular matrices are rejected") {
  const SmallMatrix<ExactComplex> s{{ExactComplex(1), ExactComplex(2)}, {ExactComplex(2), ExactComplex(4)}};
  CHECK_THROWS_AS(s.inverse(), std::domain_error);
  const SmallMatrix<Complex> f{{1.0, 2.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(f.inverse(), std::domain_error);
  CHECK_THROWS_AS(SmallMatrix<Complex>(2, 3).inverse(), std::invalid_argument);
}

TEST_CASE("floating inverse and products") {
  const SmallMatrix<Complex> m{{2.0, Complex(0, 1)}, {Complex(0, -1), 3.0}};
  const auto inv = m.inverse();
  CHECK(max_abs_diff(m * inv, SmallMatrix<Complex>::identity(2)) < 1e-15);
  CHECK_THROWS_AS(m * SmallMatrix<Complex>(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(m + SmallMatrix<Complex>(3, 3), std::invalid_argument);
}

TEST_CASE("structure matrices") {
  const auto eps = levi_civita<ExactComplex>();
  CHECK(eps(0, 1) == ExactComplex(1));
  CHECK(eps.transpose() == -eps);
  CHECK(eps * eps == -SmallMatrix<ExactComplex>::identity(2));
  const auto s = pauli_x<ExactComplex>();
  CHECK(s * s == SmallMatrix<ExactComplex>::identity(2));
  const auto g = minkowski_metric<ExactComplex>();
  CHECK(g * g == SmallMatrix<ExactComplex>::identity(2));
  // sigma anticommutes with g, so it generates boosts preserving g
  CHECK((s.transpose() * g + g * s).is_exactly_zero());
}

TEST_CASE("symmetric and antisymmetric parts recombine") {
  const SmallMatrix<ExactComplex> m{{ExactComplex(1), ExactComplex(5)}, {ExactComplex(-2), ExactComplex(7)}};
  CHECK(m.symmetric_part() + m.antisymmetric_part() == m);
  CHECK(m.symmetric_part() == m.symmetric_part().transpose());
  CHECK(m.antisymmetric_part() == -m.antisymmetric_part().transpose());
  CHECK(m.block({1}, {0, 1}) == SmallMatrix<ExactComplex>{{ExactComplex(-2), ExactComplex(7)}});
}
