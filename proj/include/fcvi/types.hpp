// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fcvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Malformed caller input: dimension mismatch, infeasible probe, bad argument.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration: unknown policy name, B < 1, missing known solution,
// unparseable experiment file. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite value produced mid-run. Carries the iteration it surfaced at.
struct NumericalError : std::runtime_error {
  NumericalError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration(iteration) {}
  long iteration;
};

// Operation outside supported size (grid oracles are desk-scale only).
struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_dim(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(n) +
                     ", got " + std::to_string(v.size()));
}

}  // namespace fcvi
