// Truncated multimode bosonic Fock spaces and their elementary operators.
//
// Basis ordering: mode 0 is the leftmost Kronecker factor, so the basis index
// of |n_0, n_1, ..., n_{m-1}> is sum_j n_j * N^(m-1-j).

#ifndef OSCALG_FOCK_HPP
#define OSCALG_FOCK_HPP

#include "oscalg/scalar.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oscalg {

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

inline constexpr std::size_t kMaxFockDimension = 4096;

class FockSpace {
 public:
  FockSpace(std::size_t n_modes, std::size_t cutoff, double omega = 1.0)
      : n_modes_(n_modes), cutoff_(cutoff), omega_(omega) {
    if (n_modes == 0) throw std::invalid_argument("FockSpace: need at least one mode");
    if (cutoff < 2) throw std::invalid_argument("FockSpace: cutoff must be >= 2");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("FockSpace: omega must be positive");
    dim_ = 1;
    for (std::size_t m = 0; m < n_modes; ++m) {
      dim_ *= cutoff;
      if (dim_ > kMaxFockDimension)
        throw std::invalid_argument("FockSpace: dimension exceeds " + std::to_string(kMaxFockDimension));
    }
  }

  std::size_t n_modes() const { return n_modes_; }
  std::size_t cutoff() const { return cutoff_; }
  double omega() const { return omega_; }
  std::size_t dimension() const { return dim_; }

  /// Occupation numbers of a basis index.
  std::vector<std::size_t> occupations(std::size_t index) const {
    std::vector<std::size_t> occ(n_modes_);
    for (std::size_t m = n_modes_; m-- > 0;) {
      occ[m] = index % cutoff_;
      index /= cutoff_;
    }
    return occ;
  }

  std::size_t index_of(const std::vector<std::size_t>& occ) const {
    if (occ.size() != n_modes_) throw std::invalid_argument("FockSpace: occupation vector has wrong length");
    std::size_t idx = 0;
    for (std::size_t n : occ) {
      if (n >= cutoff_) throw std::out_of_range("FockSpace: occupation beyond cutoff");
      idx = idx * cutoff_ + n;
    }
    return idx;
  }

  DenseVector basis_state(const std::vector<std::size_t>& occ) const {
    DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(dim_));
    v(static_cast<Eigen::Index>(index_of(occ))) = 1.0;
    return v;
  }

  friend bool operator==(const FockSpace& a, const FockSpace& b) {
    return a.n_modes_ == b.n_modes_ && a.cutoff_ == b.cutoff_ && a.omega_ == b.omega_;
  }

 private:
  std::size_t n_modes_;
  std::size_t cutoff_;
  double omega_;
  std::size_t dim_ = 1;
};

/// Dense operator on a FockSpace. Immutable once built.
class OperatorMatrix {
 public:
  OperatorMatrix(FockSpace space, DenseMatrix entries, std::string label = {})
      : space_(std::move(space)), entries_(std::move(entries)), label_(std::move(label)) {
    const auto n = static_cast<Eigen::Index>(space_.dimension());
    if (entries_.rows() != n || entries_.cols() != n)
      throw std::invalid_argument("OperatorMatrix: entries do not match the space dimension");
    if (!entries_.allFinite()) throw std::invalid_argument("OperatorMatrix: non-finite entry");
  }

  static OperatorMatrix identity(const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.dimension());
    return {space, DenseMatrix::Identity(n, n), "I"};
  }
  static OperatorMatrix zero(const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.dimension());
    return {space, DenseMatrix::Zero(n, n), "0"};
  }

  const FockSpace& space() const { return space_; }
  const DenseMatrix& matrix() const { return entries_; }
  const std::string& label() const { return label_; }

  OperatorMatrix relabel(std::string label) const { return {space_, entries_, std::move(label)}; }

  OperatorMatrix adjoint() const { return {space_, entries_.adjoint(), label_ + "^dag"}; }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    a.require_same_space(b);
    return {a.space_, a.entries_ + b.entries_, "(" + a.label_ + "+" + b.label_ + ")"};
  }
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    a.require_same_space(b);
    return {a.space_, a.entries_ - b.entries_, "(" + a.label_ + "-" + b.label_ + ")"};
  }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    a.require_same_space(b);
    return {a.space_, a.entries_ * b.entries_, a.label_ + b.label_};
  }
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return {a.space_, s * a.entries_, a.label_}; }
  friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return {a.space_, s * a.entries_, a.label_}; }

  void require_same_space(const OperatorMatrix& other) const {
    if (!(space_ == other.space_)) throw std::invalid_argument("OperatorMatrix: operands live on different spaces");
  }

 private:
  FockSpace space_;
  DenseMatrix entries_;
  std::string label_;
};

/// States whose every mode occupation is at most N-1-guard.
class ProjectedSubspace {
 public:
  ProjectedSubspace(FockSpace space, std::size_t guard) : space_(std::move(space)), guard_(guard) {
    if (guard >= space_.cutoff()) throw std::invalid_argument("ProjectedSubspace: guard must be below the cutoff");
    const std::size_t top = space_.cutoff() - 1 - guard_;
    for (std::size_t i = 0; i < space_.dimension(); ++i) {
      const auto occ = space_.occupations(i);
      bool inside = true;
      for (std::size_t n : occ) inside = inside && n <= top;
      if (inside) indices_.push_back(i);
    }
  }

  const FockSpace& space() const { return space_; }
  std::size_t guard() const { return guard_; }
  /// Basis indices spanning the subspace, ascending.
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t dimension() const { return indices_.size(); }

  DenseMatrix projector() const {
    const auto n = static_cast<Eigen::Index>(space_.dimension());
    DenseMatrix p = DenseMatrix::Zero(n, n);
    for (std::size_t i : indices_) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
  }

  /// P M P restricted to the subspace's own basis.
  DenseMatrix compress(const DenseMatrix& m) const {
    const auto k = static_cast<Eigen::Index>(indices_.size());
    DenseMatrix out(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        out(r, c) = m(static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(r)]),
                      static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(c)]));
    return out;
  }

 private:
  FockSpace space_;
  std::size_t guard_;
  std::vector<std::size_t> indices_;
};

namespace detail {

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline void require_mode(const FockSpace& space, std::size_t mode) {
  if (mode >= space.n_modes())
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for " +
                            std::to_string(space.n_modes()) + "-mode space");
}

inline DenseMatrix embed(const FockSpace& space, std::size_t mode, const DenseMatrix& single) {
  const auto n = static_cast<Eigen::Index>(space.cutoff());
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  for (std::size_t m = 0; m < space.n_modes(); ++m)
    out = kron(out, m == mode ? single : DenseMatrix::Identity(n, n));
  return out;
}

}  // namespace detail

/// Truncated annihilation operator: <n-1|a|n> = sqrt(n) on `mode`.
inline OperatorMatrix annihilation(const FockSpace& space, std::size_t mode) {
  detail::require_mode(space, mode);
  const auto n = static_cast<Eigen::Index>(space.cutoff());
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return {space, detail::embed(space, mode, a), "a" + std::to_string(mode)};
}

inline OperatorMatrix creation(const FockSpace& space, std::size_t mode) {
  return annihilation(space, mode).adjoint().relabel("a" + std::to_string(mode) + "^dag");
}

/// a^dag a, built diagonal so its entries are exact integers.
inline OperatorMatrix number(const FockSpace& space, std::size_t mode) {
  detail::require_mode(space, mode);
  const auto n = static_cast<Eigen::Index>(space.cutoff());
  DenseMatrix d = DenseMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) d(k, k) = static_cast<double>(k);
  return {space, detail::embed(space, mode, d), "n" + std::to_string(mode)};
}

/// x = (a + a^dag)/sqrt(2 omega), p = i sqrt(omega/2)(a^dag - a).
inline std::pair<OperatorMatrix, OperatorMatrix> position_momentum(const FockSpace& space, std::size_t mode) {
  const OperatorMatrix a = annihilation(space, mode);
  const OperatorMatrix ad = a.adjoint();
  const double w = space.omega();
  OperatorMatrix x = (1.0 / std::sqrt(2.0 * w)) * (a + ad);
  OperatorMatrix p = Complex(0.0, std::sqrt(w / 2.0)) * (ad - a);
  return {x.relabel("x" + std::to_string(mode + 1)), p.relabel("p" + std::to_string(mode + 1))};
}

inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  a.require_same_space(b);
  return {a.space(), a.matrix() * b.matrix() - b.matrix() * a.matrix(), "[" + a.label() + "," + b.label() + "]"};
}

/// Frobenius norm of P(A - B)P.
inline double residual_on_subspace(const OperatorMatrix& a, const OperatorMatrix& b, const ProjectedSubspace& sub) {
  a.require_same_space(b);
  if (!(a.space() == sub.space())) throw std::invalid_argument("residual_on_subspace: subspace belongs to another space");
  return sub.compress(a.matrix() - b.matrix()).norm();
}

/// Frobenius norm of P A P.
inline double norm_on_subspace(const OperatorMatrix& a, const ProjectedSubspace& sub) {
  return residual_on_subspace(a, OperatorMatrix::zero(a.space()), sub);
}

}  // namespace oscalg

#endif  // OSCALG_FOCK_HPP
