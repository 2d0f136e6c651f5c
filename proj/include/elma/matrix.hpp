// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "elma/error.hpp"

namespace elma {

using Index = Eigen::Index;

/// Dense row-major matrix; the carrier for observations, estimates, noise
/// and patch groups.
template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw ParameterError(std::string(what) + ": non-finite entry");
  }
}

/// Builds a rows x cols matrix from row-major data. Rejects empty shapes,
/// size mismatches and NaN/Inf entries.
template <typename Scalar>
MatrixX<Scalar> make_matrix(Index rows, Index cols,
                            std::span<const Scalar> row_major) {
  if (rows < 1 || cols < 1) {
    throw ParameterError("make_matrix: dimensions must be positive");
  }
  if (static_cast<Index>(row_major.size()) != rows * cols) {
    throw ParameterError("make_matrix: data length != rows*cols");
  }
  MatrixX<Scalar> m =
      Eigen::Map<const MatrixX<Scalar>>(row_major.data(), rows, cols);
  require_finite(m, "make_matrix");
  return m;
}

/// Sum of squared entries, i.e. trace(M^T M).
template <typename Derived>
typename Derived::RealScalar frobenius_norm_sq(
    const Eigen::MatrixBase<Derived>& m) {
  return m.squaredNorm();
}

/// Seedable random source. Uniform bits come from std::mt19937_64; normal
/// variates from std::normal_distribution over that engine. Streams are
/// reproducible for a given seed within one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  /// Independent seed for a sub-task (worker, sweep cell) derived from a base
  /// seed and two indices via splitmix64 mixing.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t i,
                              std::uint64_t j);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// i.i.d. standard normal matrix, filled in row-major order.
template <typename Scalar = double>
MatrixX<Scalar> random_gaussian(Index rows, Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw ParameterError("random_gaussian: dimensions must be positive");
  }
  MatrixX<Scalar> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = static_cast<Scalar>(rng.normal());
    }
  }
  return m;
}

/// Returns m + W with W_ij ~ N(0, sigma^2) i.i.d. sigma == 0 returns m
/// unchanged and does not advance the generator.
template <typename Derived>
MatrixX<typename Derived::Scalar> add_awgn(const Eigen::MatrixBase<Derived>& m,
                                           double sigma, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("add_awgn: sigma must be finite and >= 0");
  }
  MatrixX<Scalar> out = m;
  if (sigma == 0.0) return out;
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      out(i, j) += static_cast<Scalar>(sigma * rng.normal());
    }
  }
  return out;
}

// Plain CSV: one row per line, comma separated, no header.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const Matrix& m);

/// Decimal text that round-trips a double exactly ("%.17g").
std::string format_real(double v);

}  // namespace elma
