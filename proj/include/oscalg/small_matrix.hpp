// Dense row-major matrix over an arbitrary scalar. Used for coefficient
// blocks of Lagrangians, symplectic pairings and linear maps, which are at
// most a handful of rows and must work over exact rationals.

#ifndef OSCALG_SMALL_MATRIX_HPP
#define OSCALG_SMALL_MATRIX_HPP

#include "oscalg/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscalg {

template <Scalar T>
class SmallMatrix {
 public:
  SmallMatrix() = default;
  SmallMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  SmallMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("SmallMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static SmallMatrix zero(std::size_t n) { return SmallMatrix(n, n); }
  static SmallMatrix identity(std::size_t n) {
    SmallMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  SmallMatrix transpose() const {
    SmallMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  SmallMatrix symmetric_part() const {
    require_square("symmetric_part");
    SmallMatrix s(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) s(r, c) = ((*this)(r, c) + (*this)(c, r)) / T(2);
    return s;
  }

  SmallMatrix antisymmetric_part() const {
    require_square("antisymmetric_part");
    SmallMatrix s(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) s(r, c) = ((*this)(r, c) - (*this)(c, r)) / T(2);
    return s;
  }

  /// Rows/columns picked by index lists.
  SmallMatrix block(const std::vector<std::size_t>& row_idx, const std::vector<std::size_t>& col_idx) const {
    SmallMatrix b(row_idx.size(), col_idx.size());
    for (std::size_t r = 0; r < row_idx.size(); ++r)
      for (std::size_t c = 0; c < col_idx.size(); ++c) b(r, c) = (*this)(row_idx[r], col_idx[c]);
    return b;
  }

  SmallMatrix& operator+=(const SmallMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  SmallMatrix& operator-=(const SmallMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SmallMatrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) { return a += b; }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) { return a -= b; }
  friend SmallMatrix operator-(SmallMatrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend SmallMatrix operator*(SmallMatrix a, const T& s) { return a *= s; }
  friend SmallMatrix operator*(const T& s, SmallMatrix a) { return a *= s; }
  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("SmallMatrix: product dimension mismatch");
    SmallMatrix p(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& lhs = a(r, k);
        if constexpr (ScalarTraits<T>::exact) {
          if (lhs.is_zero()) continue;
        }
        for (std::size_t c = 0; c < b.cols_; ++c) p(r, c) += lhs * b(k, c);
      }
    return p;
  }
  friend bool operator==(const SmallMatrix& a, const SmallMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("SmallMatrix: vector dimension mismatch");
    std::vector<T> out(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  /// Gauss-Jordan inverse with magnitude pivoting. Throws std::domain_error
  /// when the matrix is singular (exactly, or below 1e-14 relative pivot in
  /// floating point).
  SmallMatrix inverse() const {
    require_square("inverse");
    const std::size_t n = rows_;
    SmallMatrix a = *this;
    SmallMatrix inv = identity(n);
    double scale = 0.0;
    for (const auto& v : data_) scale = std::max(scale, ScalarTraits<T>::magnitude(v));
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      double best = -1.0;
      for (std::size_t r = col; r < n; ++r) {
        const double m = ScalarTraits<T>::magnitude(a(r, col));
        if (m > best) {
          best = m;
          pivot = r;
        }
      }
      bool singular = false;
      if constexpr (ScalarTraits<T>::exact) {
        singular = a(pivot, col).is_zero();
      } else {
        singular = best <= 1e-14 * std::max(scale, 1e-300);
      }
      if (singular) throw std::domain_error("SmallMatrix: singular matrix");
      if (pivot != col) {
        for (std::size_t c = 0; c < n; ++c) {
          std::swap(a(pivot, c), a(col, c));
          std::swap(inv(pivot, c), inv(col, c));
        }
      }
      const T p = a(col, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(col, c) /= p;
        inv(col, c) /= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const T f = a(r, col);
        if constexpr (ScalarTraits<T>::exact) {
          if (f.is_zero()) continue;
        }
        for (std::size_t c = 0; c < n; ++c) {
          a(r, c) -= f * a(col, c);
          inv(r, c) -= f * inv(col, c);
        }
      }
    }
    return inv;
  }

  /// Largest entry magnitude.
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, ScalarTraits<T>::magnitude(v));
    return m;
  }

  bool is_exactly_zero() const {
    if constexpr (ScalarTraits<T>::exact) {
      return std::all_of(data_.begin(), data_.end(), [](const T& v) { return v.is_zero(); });
    } else {
      return std::all_of(data_.begin(), data_.end(), [](const T& v) { return v == T(0); });
    }
  }

  SmallMatrix<Complex> to_complex() const {
    SmallMatrix<Complex> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = ScalarTraits<T>::to_complex((*this)(r, c));
    return out;
  }

 private:
  void require_square(const char* what) const {
    if (!square()) throw std::invalid_argument(std::string("SmallMatrix: ") + what + " needs a square matrix");
  }
  void require_same_shape(const SmallMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("SmallMatrix: shape mismatch in ") + op);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Levi-Civita symbol with eps(0,1) = +1.
template <Scalar T>
SmallMatrix<T> levi_civita() {
  return {{T(0), T(1)}, {T(-1), T(0)}};
}

/// First Pauli matrix.
template <Scalar T>
SmallMatrix<T> pauli_x() {
  return {{T(0), T(1)}, {T(1), T(0)}};
}

/// Pseudo-Euclidean metric diag(1, -1).
template <Scalar T>
SmallMatrix<T> minkowski_metric() {
  return {{T(1), T(0)}, {T(0), T(-1)}};
}

template <Scalar T>
double max_abs_diff(const SmallMatrix<T>& a, const SmallMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  return (a - b).max_abs();
}

}  // namespace oscalg

#endif  // OSCALG_SMALL_MATRIX_HPP
