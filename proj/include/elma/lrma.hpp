// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "elma/matrix.hpp"
#include "elma/penalty.hpp"
#include "elma/svd.hpp"

namespace elma {

/// Output of a closed-form low-rank solve.
///
/// sigma_out is the thresholded spectrum, so it is also the spectrum of
/// x_hat. penalty_sum is sum_i phi(sigma_out_i) and is empty for families
/// without a penalty expression; objective then holds the data term only.
template <typename Scalar>
struct LrmaResult {
  MatrixX<Scalar> x_hat;
  VectorX<Scalar> sigma_in;
  VectorX<Scalar> sigma_out;
  Scalar data_term = 0;
  std::optional<Scalar> penalty_sum;
  Scalar objective = 0;
};

/// 1/2 ||Y - X||_F^2 + lambda * sum_i phi(sigma_i(X); a).
template <typename DerivedY, typename DerivedX>
typename DerivedY::Scalar objective_eval(const Eigen::MatrixBase<DerivedY>& y,
                                         const Eigen::MatrixBase<DerivedX>& x,
                                         const PenaltySpec& spec) {
  using Scalar = typename DerivedY::Scalar;
  if (y.rows() != x.rows() || y.cols() != x.cols()) {
    throw ParameterError("objective_eval: shape mismatch");
  }
  detail::require_penalty(spec, "objective_eval");
  const VectorX<Scalar> s = singular_values(x);
  Scalar pen = 0;
  for (Index i = 0; i < s.size(); ++i) pen += penalty_eval(spec, s(i));
  return Scalar(0.5) * (y - x).squaredNorm() +
         static_cast<Scalar>(spec.lambda()) * pen;
}

/// Thresholds the spectrum of precomputed factors of Y and rebuilds
/// x_hat = U Theta(Sigma) V^T. For the partly quadratic family with
/// a < 1/lambda this is the unique global minimizer of the objective above;
/// with SoftL1 it is singular value thresholding.
template <typename Scalar>
LrmaResult<Scalar> solve(const MatrixX<Scalar>& y,
                         const SvdFactors<Scalar>& f,
                         const PenaltySpec& spec) {
  LrmaResult<Scalar> r;
  r.sigma_in = f.sigma;
  r.sigma_out = threshold_spectrum(spec, f.sigma);
  r.x_hat = reconstruct(f.u, r.sigma_out, f.v);
  r.data_term = Scalar(0.5) * (y - r.x_hat).squaredNorm();
  r.objective = r.data_term;
  if (spec.has_penalty()) {
    Scalar pen = 0;
    for (Index i = 0; i < r.sigma_out.size(); ++i) {
      pen += penalty_eval(spec, r.sigma_out(i));
    }
    r.penalty_sum = pen;
    r.objective += static_cast<Scalar>(spec.lambda()) * pen;
  }
  return r;
}

template <typename Derived>
LrmaResult<typename Derived::Scalar> solve(const Eigen::MatrixBase<Derived>& y,
                                           const PenaltySpec& spec) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> yy = y;
  return solve(yy, svd(yy), spec);
}

/// Number of entries of sigma_out strictly above tol.
template <typename Scalar>
Index rank_of(const LrmaResult<Scalar>& r, double tol = 0.0) {
  if (!(tol >= 0.0)) throw ParameterError("rank_of: tol must be >= 0");
  return (r.sigma_out.array() > static_cast<Scalar>(tol)).count();
}

}  // namespace elma
