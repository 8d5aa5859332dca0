// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ddgan {

/// Invalid configuration or hyperparameters.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;

  /// One error listing every problem.
  static ConfigError from(std::vector<std::string> const &problems)
  {
    std::string msg = "invalid configuration:";
    for (auto const &p : problems) msg += "\n  - " + p;
    return ConfigError(msg);
  }
};

/// Malformed or unsupported input data (file formats, manifests, signals).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A loss or parameter became NaN/Inf during training.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace ddgan
