// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <Eigen/SVD>

#include "elma/matrix.hpp"

namespace elma {

/// Singular values below this fraction of the largest one are set to 0.
inline constexpr double kSigmaClampRatio = 1e-12;

/// Thin SVD Y = U diag(sigma) V^T with k = min(m, n).
///
/// sigma is non-increasing and non-negative; U (m x k) and V (n x k) have
/// orthonormal columns.
template <typename Scalar>
struct SvdFactors {
  MatrixX<Scalar> u;
  VectorX<Scalar> sigma;
  MatrixX<Scalar> v;

  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }
};

/// Thin SVD of a finite dense matrix.
///
/// Backed by Eigen's divide-and-conquer bidiagonal SVD (which switches to
/// two-sided Jacobi below 16 columns). Singular values smaller than
/// kSigmaClampRatio * sigma_1 are clamped to exactly zero. Throws
/// ParameterError on non-finite input and NumericalError if the backend
/// reports failure or returns an unordered/non-finite spectrum.
template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (y.rows() < 1 || y.cols() < 1) {
    throw ParameterError("svd: empty matrix");
  }
  require_finite(y, "svd");

  const Dense dense = y;
  Eigen::BDCSVD<Dense> solver(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("svd: decomposition failed for " +
                         std::to_string(y.rows()) + "x" +
                         std::to_string(y.cols()) + " input");
  }

  SvdFactors<Scalar> f{solver.matrixU(), solver.singularValues(),
                       solver.matrixV()};
  if (!f.sigma.allFinite() || !f.u.allFinite() || !f.v.allFinite()) {
    throw NumericalError("svd: non-finite factors");
  }
  for (Index i = 1; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > f.sigma(i - 1)) {
      throw NumericalError("svd: singular values not sorted");
    }
  }
  const Scalar floor = f.sigma(0) * static_cast<Scalar>(kSigmaClampRatio);
  for (Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) < floor || f.sigma(i) < Scalar(0)) f.sigma(i) = Scalar(0);
  }
  return f;
}

/// Singular values only.
template <typename Derived>
VectorX<typename Derived::Scalar> singular_values(
    const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_finite(y, "singular_values");
  const Dense dense = y;
  Eigen::BDCSVD<Dense> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("singular_values: decomposition failed");
  }
  VectorX<Scalar> s = solver.singularValues();
  const Scalar floor = s.size() ? s(0) * static_cast<Scalar>(kSigmaClampRatio)
                                : Scalar(0);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) < floor) s(i) = Scalar(0);
  }
  return s;
}

/// U diag(sigma) V^T for an arbitrary sigma of length k.
template <typename Scalar>
MatrixX<Scalar> reconstruct(const MatrixX<Scalar>& u,
                            const VectorX<Scalar>& sigma,
                            const MatrixX<Scalar>& v) {
  if (u.cols() != sigma.size() || v.cols() != sigma.size()) {
    throw ParameterError("reconstruct: factor shapes disagree");
  }
  return u * sigma.asDiagonal() * v.transpose();
}

template <typename Scalar>
MatrixX<Scalar> reconstruct(const SvdFactors<Scalar>& f) {
  return reconstruct(f.u, f.sigma, f.v);
}

/// Sum of singular values.
template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& y) {
  return singular_values(y).sum();
}

}  // namespace elma
