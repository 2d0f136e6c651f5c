// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elma/matrix.hpp"

namespace elma {

enum class PenaltyFamily {
  /// phi(x;a) = |x| - a x^2 / 2 for |x| <= 1/a, 1/(2a) beyond. Firm threshold.
  PartlyQuadratic,
  /// phi(x) = |x|. Soft threshold (nuclear norm on singular values).
  SoftL1,
  /// p-shrinkage: sign(y) max(|y| - lambda^(2-p) |y|^(p-1), 0).
  PShrinkage,
  /// Soft threshold with weights inversely proportional to singular values.
  WeightedSoft,
};

std::string_view family_name(PenaltyFamily f);

/// Smallest non-convexity parameter that breaks strict convexity of
/// 1/2 (y - x)^2 + lambda phi(x; a): valid a satisfy 0 <= a < 1/lambda.
inline double convexity_max_a(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("convexity_max_a: lambda must be > 0");
  }
  return 1.0 / lambda;
}

/// Immutable penalty description. Factories validate parameters; in
/// particular partly_quadratic() rejects a >= 1/lambda.
class PenaltySpec {
 public:
  static PenaltySpec partly_quadratic(double lambda, double a);
  /// Partly quadratic with a = a_fraction / lambda, a_fraction in [0, 1).
  static PenaltySpec firm(double lambda, double a_fraction);
  static PenaltySpec soft(double lambda);
  static PenaltySpec p_shrinkage(double lambda, double p);
  static PenaltySpec weighted_soft(double lambda, double weight_eps = 1e-6);

  PenaltyFamily family() const { return family_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  double p() const { return p_; }
  double weight_eps() const { return weight_eps_; }

  /// True for the families whose penalty phi has a closed form here.
  bool has_penalty() const {
    return family_ == PenaltyFamily::PartlyQuadratic ||
           family_ == PenaltyFamily::SoftL1;
  }

 private:
  PenaltySpec(PenaltyFamily family, double lambda)
      : family_(family), lambda_(lambda) {}

  PenaltyFamily family_;
  double lambda_;
  double a_ = 0.0;
  double p_ = 0.0;
  double weight_eps_ = 0.0;
};

namespace detail {
inline void require_penalty(const PenaltySpec& spec, const char* op) {
  if (!spec.has_penalty()) {
    throw UnsupportedError(std::string(op) + ": no penalty expression for " +
                           std::string(family_name(spec.family())));
  }
}

template <typename Scalar>
Scalar sign(Scalar y) {
  return y > Scalar(0) ? Scalar(1) : (y < Scalar(0) ? Scalar(-1) : Scalar(0));
}

template <typename Scalar>
Scalar soft(Scalar y, Scalar t) {
  return sign(y) * std::max(std::abs(y) - t, Scalar(0));
}
}  // namespace detail

/// phi(x; a).
template <typename Scalar>
Scalar penalty_eval(const PenaltySpec& spec, Scalar x) {
  detail::require_penalty(spec, "penalty_eval");
  const Scalar ax = std::abs(x);
  const Scalar a = static_cast<Scalar>(spec.a());
  if (spec.family() == PenaltyFamily::SoftL1 || a == Scalar(0)) return ax;
  if (ax * a <= Scalar(1)) return ax - a / 2 * ax * ax;
  return Scalar(1) / (2 * a);
}

/// s(x; a) = phi(x; a) - |x|. Concave, with -a <= s'' <= 0.
template <typename Scalar>
Scalar s_eval(const PenaltySpec& spec, Scalar x) {
  detail::require_penalty(spec, "s_eval");
  const Scalar ax = std::abs(x);
  const Scalar a = static_cast<Scalar>(spec.a());
  if (spec.family() == PenaltyFamily::SoftL1 || a == Scalar(0)) return 0;
  if (ax * a <= Scalar(1)) return -a / 2 * ax * ax;
  return Scalar(1) / (2 * a) - ax;
}

/// Scalar threshold (proximal) operator Theta(y). For WeightedSoft the
/// scalar form uses lambda as the weight; per-index weights are applied by
/// threshold_spectrum().
template <typename Scalar>
Scalar threshold(const PenaltySpec& spec, Scalar y) {
  const Scalar lambda = static_cast<Scalar>(spec.lambda());
  const Scalar ay = std::abs(y);
  switch (spec.family()) {
    case PenaltyFamily::PartlyQuadratic: {
      const Scalar a = static_cast<Scalar>(spec.a());
      const Scalar ramp = std::max((ay - lambda) / (Scalar(1) - a * lambda),
                                   Scalar(0));
      return std::min(ay, ramp) * detail::sign(y);
    }
    case PenaltyFamily::SoftL1:
    case PenaltyFamily::WeightedSoft:
      return detail::soft(y, lambda);
    case PenaltyFamily::PShrinkage: {
      if (ay == Scalar(0)) return 0;
      // lambda^(2-p) |y|^(p-1) written as lambda (lambda/|y|)^(1-p).
      const Scalar p = static_cast<Scalar>(spec.p());
      const Scalar shrink = lambda * std::pow(lambda / ay, Scalar(1) - p);
      return detail::sign(y) * std::max(ay - shrink, Scalar(0));
    }
  }
  return 0;
}

/// Per-index soft-threshold weights w_i = c / (sigma_i + eps), with c chosen
/// so that the largest weight equals lambda.
template <typename Scalar>
VectorX<Scalar> inverse_sigma_weights(const PenaltySpec& spec,
                                      const VectorX<Scalar>& sigma) {
  const Scalar eps = static_cast<Scalar>(spec.weight_eps());
  VectorX<Scalar> w(sigma.size());
  if (sigma.size() == 0) return w;
  const Scalar c = static_cast<Scalar>(spec.lambda()) * (sigma.minCoeff() + eps);
  for (Index i = 0; i < sigma.size(); ++i) w(i) = c / (sigma(i) + eps);
  return w;
}

/// Applies the family's threshold to a non-increasing, non-negative spectrum.
template <typename Scalar>
VectorX<Scalar> threshold_spectrum(const PenaltySpec& spec,
                                   const VectorX<Scalar>& sigma) {
  VectorX<Scalar> out(sigma.size());
  if (spec.family() == PenaltyFamily::WeightedSoft) {
    const VectorX<Scalar> w = inverse_sigma_weights(spec, sigma);
    for (Index i = 0; i < sigma.size(); ++i) {
      out(i) = detail::soft(sigma(i), w(i));
    }
    return out;
  }
  for (Index i = 0; i < sigma.size(); ++i) out(i) = threshold(spec, sigma(i));
  return out;
}

struct CurveRow {
  double x;
  std::optional<double> phi;
  std::optional<double> s;
  double theta;
};

/// Samples phi, s and Theta on lo, lo + step, ... up to hi (inclusive within
/// a relative 1e-9 of a step). phi and s are empty for families without a
/// penalty expression.
std::vector<CurveRow> emit_curves(const PenaltySpec& spec, double lo, double hi,
                                  double step);

/// CSV with header `x,phi,s,theta`; missing values are empty fields.
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);

}  // namespace elma
