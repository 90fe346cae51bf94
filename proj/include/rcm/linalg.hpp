#pragma once

// Dense complex Hermitian kernels. Every S^{-1} contraction in the library goes
// through a Factorization; explicit inverses are never formed.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "rcm/errors.hpp"

namespace rcm {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
/// Full (unpacked) storage; Hermitian by contract.
using HermitianMatrix = ComplexMatrix;

namespace detail {
inline thread_local std::uint64_t factorization_counter = 0;
}

/// Number of factorizations performed on the calling thread so far.
inline std::uint64_t factorization_count() { return detail::factorization_counter; }

/// Lower-triangular Cholesky factor L with a = L L^H.
template <typename Real>
class Factorization {
 public:
  explicit Factorization(CMatrix<Real> lower) : lower_(std::move(lower)) {}

  Eigen::Index dim() const { return lower_.rows(); }
  const CMatrix<Real>& lower() const { return lower_; }

  /// L^{-1} b.
  template <typename Derived>
  CMatrix<Real> whiten(const Eigen::MatrixBase<Derived>& b) const {
    check_rows(b.rows());
    return lower_.template triangularView<Eigen::Lower>().solve(b);
  }

  /// a^{-1} b via forward and back substitution.
  template <typename Derived>
  CMatrix<Real> solve(const Eigen::MatrixBase<Derived>& b) const {
    CMatrix<Real> y = whiten(b);
    lower_.adjoint().template triangularView<Eigen::Upper>().solveInPlace(y);
    return y;
  }

 private:
  void check_rows(Eigen::Index rows) const {
    if (rows != dim()) {
      throw DimensionMismatch("factorization of dimension " + std::to_string(dim()) +
                              " applied to " + std::to_string(rows) + " rows");
    }
  }

  CMatrix<Real> lower_;
};

/// Cholesky factorization of a Hermitian positive-definite matrix.
///
/// Pivots below dim * 1e-14 times the largest diagonal entry are treated as
/// non-positive: a rank-deficient scatter (K < N_a) rounds to tiny positive
/// pivots rather than exact zeros. No diagonal loading is ever applied.
template <typename Derived>
Factorization<typename Derived::RealScalar> factorize(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch("factorize: matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
  ++detail::factorization_counter;
  const Eigen::Index n = a.rows();
  Real max_diag = 0;
  for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i).real()));
  if (!(max_diag > 0) || !std::isfinite(max_diag)) {
    throw NotPositiveDefinite("factorize: zero or non-finite diagonal");
  }

  Eigen::LLT<CMatrix<Real>, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("factorize: non-positive pivot");
  }
  CMatrix<Real> lower = llt.matrixL();
  const Real floor = static_cast<Real>(n) * Real(1e-14) * max_diag;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real pivot = lower(i, i).real();
    if (!(pivot * pivot > floor)) {
      throw NotPositiveDefinite("factorize: pivot " + std::to_string(i) +
                                " is numerically zero");
    }
  }
  return Factorization<Real>(std::move(lower));
}

/// ln det a = 2 sum ln L_ii.
template <typename Real>
Real log_det(const Factorization<Real>& f) {
  Real acc = 0;
  for (Eigen::Index i = 0; i < f.dim(); ++i) acc += std::log(f.lower()(i, i).real());
  return 2 * acc;
}

/// x^H a^{-1} y = (L^{-1} x)^H (L^{-1} y).
template <typename Real, typename DX, typename DY>
std::complex<Real> quad_form(const Factorization<Real>& f, const Eigen::MatrixBase<DX>& x,
                             const Eigen::MatrixBase<DY>& y) {
  if (x.cols() != 1 || y.cols() != 1) throw DimensionMismatch("quad_form: expected vectors");
  const CVector<Real> wx = f.whiten(x);
  const CVector<Real> wy = f.whiten(y);
  return wx.dot(wy);
}

/// a + weight * x x^H, mirrored from the lower triangle so the result is
/// exactly Hermitian.
template <typename Real, typename DA, typename DX>
CMatrix<Real> rank_one_accumulate(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DX>& x,
                                  Real weight) {
  if (a.rows() != a.cols() || x.rows() != a.rows() || x.cols() != 1) {
    throw DimensionMismatch("rank_one_accumulate: dimensions do not match");
  }
  CMatrix<Real> out = a;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<Real> xk = std::conj(x(k)) * weight;
    out(k, k) = std::complex<Real>(out(k, k).real() + weight * std::norm(x(k)), out(k, k).imag());
    for (Eigen::Index i = k + 1; i < n; ++i) {
      out(i, k) += x(i) * xk;
      out(k, i) = std::conj(out(i, k));
    }
  }
  return out;
}

/// Largest |a - a^H| entry relative to the largest |a| entry.
template <typename Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  const Real scale = a.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// Hermitian part (a + a^H) / 2.
template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  return (0.5 * (a + a.adjoint())).eval();
}

}  // namespace rcm
