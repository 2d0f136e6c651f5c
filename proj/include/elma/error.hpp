// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace elma {

/// Invalid argument: bad shape, out-of-range parameter, non-finite data.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to converge or produced unusable output.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested operation is not defined for the given penalty family.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or unsupported file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elma
