// risk/errors.hpp

// Copyright 2026  RISK subspace recovery authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RISK_ERRORS_HPP
#define RISK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace risk {

/// Base class of all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Precondition violations on values (bad counts, bad ranges, asymmetry, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

/// Dimension disagreement between operands.
struct ShapeError : Error {
  using Error::Error;
};

/// Numerically rank-deficient input where full rank is required.
struct RankError : Error {
  using Error::Error;
};

/// What exactly is wrong with a dataset or model file.
enum class FormatIssue {
  bad_magic,
  bad_version,
  truncated,
  bad_checksum,
  label_out_of_range,
  unknown_split_tag,
  bad_field,
};

struct FormatError : Error {
  FormatError(FormatIssue issue, const std::string& what)
      : Error(what), issue(issue) {}
  FormatIssue issue;
};

/// Malformed or inconsistent run configuration; `key` is the offending path.
struct ConfigError : Error {
  ConfigError(std::string key, const std::string& what)
      : Error(what), key(std::move(key)) {}
  std::string key;
};

/// Non-finite value encountered during training; `component` names the loss
/// term that produced it.
struct NumericalError : Error {
  NumericalError(std::string component, const std::string& what)
      : Error(what), component(std::move(component)) {}
  std::string component;
};

/// Filesystem-level failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace risk

#endif  // RISK_ERRORS_HPP
