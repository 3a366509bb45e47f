// Scalar types shared by the Lagrangian and phase-space layers.
//
// Two scalars are supported: std::complex<double> for floating point work and
// ExactComplex (Gaussian rationals) for runs where every input is rational.

#ifndef OSCALG_SCALAR_HPP
#define OSCALG_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oscalg {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

/// Complex number with exact rational real and imaginary parts.
class ExactComplex {
 public:
  ExactComplex() = default;
  ExactComplex(int re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}

  static ExactComplex i() { return {Rational(0), Rational(1)}; }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }

  ExactComplex conj() const { return {re_, -im_}; }

  ExactComplex operator-() const { return {-re_, -im_}; }

  ExactComplex& operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }
  ExactComplex& operator/=(const ExactComplex& o) {
    const Rational den = o.re_ * o.re_ + o.im_ * o.im_;
    if (den == 0) throw std::domain_error("ExactComplex: division by zero");
    Rational re = (re_ * o.re_ + im_ * o.im_) / den;
    Rational im = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  Complex to_complex() const {
    return {static_cast<double>(re_), static_cast<double>(im_)};
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex i() { return {0.0, 1.0}; }
  static Complex from_rational(const Rational& r) { return {static_cast<double>(r), 0.0}; }
  static Complex conj(const Complex& z) { return std::conj(z); }
  static double magnitude(const Complex& z) { return std::abs(z); }
  static Complex to_complex(const Complex& z) { return z; }
};

template <>
struct ScalarTraits<ExactComplex> {
  static constexpr bool exact = true;
  static ExactComplex i() { return ExactComplex::i(); }
  static ExactComplex from_rational(const Rational& r) { return {r}; }
  static ExactComplex conj(const ExactComplex& z) { return z.conj(); }
  static double magnitude(const ExactComplex& z) { return std::abs(z.to_complex()); }
  static Complex to_complex(const ExactComplex& z) { return z.to_complex(); }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

/// Parses "3", "-3/2", "0.25" or "1e-3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    Rational num(s.substr(0, slash));
    Rational den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t pos = 0;
  const bool negative = s[0] == '-';
  if (s[0] == '-' || s[0] == '+') pos = 1;
  boost::multiprecision::cpp_int mantissa = 0;
  boost::multiprecision::cpp_int scale = 1;
  bool seen_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (after_point) scale *= 10;
      seen_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a rational literal: '" + s + "'");
  Rational value(mantissa, scale);
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("not a rational literal: '" + s + "'");
    const std::string exp_text = s.substr(pos + 1);
    std::size_t used = 0;
    int exponent = 0;
    try {
      exponent = std::stoi(exp_text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent in '" + s + "'");
    }
    if (used != exp_text.size()) throw std::invalid_argument("bad exponent in '" + s + "'");
    boost::multiprecision::cpp_int p = 1;
    for (int k = 0; k < std::abs(exponent); ++k) p *= 10;
    value = exponent >= 0 ? value * Rational(p) : value / Rational(p);
  }
  return negative ? Rational(-value) : value;
}

}  // namespace oscalg

#endif  // OSCALG_SCALAR_HPP
