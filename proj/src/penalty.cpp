// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "elma/penalty.hpp"

#include <ostream>

namespace elma {

namespace {
void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("penalty: lambda must be finite and > 0");
  }
}
}  // namespace

std::string_view family_name(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::PartlyQuadratic: return "partly-quadratic";
    case PenaltyFamily::SoftL1: return "soft-l1";
    case PenaltyFamily::PShrinkage: return "p-shrinkage";
    case PenaltyFamily::WeightedSoft: return "weighted-soft";
  }
  return "unknown";
}

PenaltySpec PenaltySpec::partly_quadratic(double lambda, double a) {
  require_lambda(lambda);
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw ParameterError("partly quadratic penalty: a must be >= 0");
  }
  if (!(a * lambda < 1.0)) {
    throw ParameterError(
        "partly quadratic penalty: a*lambda must be < 1 for a strictly "
        "convex objective (a=" + format_real(a) +
        ", 1/lambda=" + format_real(convexity_max_a(lambda)) + ")");
  }
  PenaltySpec s(PenaltyFamily::PartlyQuadratic, lambda);
  s.a_ = a;
  return s;
}

PenaltySpec PenaltySpec::firm(double lambda, double a_fraction) {
  require_lambda(lambda);
  if (!(a_fraction >= 0.0 && a_fraction < 1.0)) {
    throw ParameterError("firm threshold: a_fraction must lie in [0, 1)");
  }
  return partly_quadratic(lambda, a_fraction / lambda);
}

PenaltySpec PenaltySpec::soft(double lambda) {
  require_lambda(lambda);
  return PenaltySpec(PenaltyFamily::SoftL1, lambda);
}

PenaltySpec PenaltySpec::p_shrinkage(double lambda, double p) {
  require_lambda(lambda);
  if (!std::isfinite(p) || p > 1.0) {
    throw ParameterError("p-shrinkage: p must be finite and <= 1");
  }
  PenaltySpec s(PenaltyFamily::PShrinkage, lambda);
  s.p_ = p;
  return s;
}

PenaltySpec PenaltySpec::weighted_soft(double lambda, double weight_eps) {
  require_lambda(lambda);
  if (!(weight_eps > 0.0) || !std::isfinite(weight_eps)) {
    throw ParameterError("weighted soft threshold: weight_eps must be > 0");
  }
  PenaltySpec s(PenaltyFamily::WeightedSoft, lambda);
  s.weight_eps_ = weight_eps;
  return s;
}

std::vector<CurveRow> emit_curves(const PenaltySpec& spec, double lo, double hi,
                                  double step) {
  if (!(step > 0.0) || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("emit_curves: need lo < hi and step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<CurveRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    CurveRow row{x, std::nullopt, std::nullopt, threshold(spec, x)};
    if (spec.has_penalty()) {
      row.phi = penalty_eval(spec, x);
      row.s = s_eval(spec, x);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "x,phi,s,theta\n";
  for (const auto& r : rows) {
    out << format_real(r.x) << ',';
    if (r.phi) out << format_real(*r.phi);
    out << ',';
    if (r.s) out << format_real(*r.s);
    out << ',' << format_real(r.theta) << '\n';
  }
}

}  // namespace elma
