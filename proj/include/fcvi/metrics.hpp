// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fcvi/problem.hpp"
#include "fcvi/trace.hpp"

namespace fcvi {

// ||[g(x)]_+||, the norm of the positive part of the constraint values.
double infeasibility(const ProblemInstance& inst, const Vector& x);

// max over probes p of <F(p), x_bar - p>. Every probe must lie in the
// simple set and satisfy g(p) <= 1e-9; violators are rejected by name.
// A certified lower bound on the true weak gap; the probe set should
// include x* whenever it is known.
double restricted_weak_gap(const ProblemInstance& inst, const Vector& x_bar,
                           const std::vector<Vector>& probes);

// Enumerates the feasible grid of the set (n <= 3) at the given step and
// maximizes <F(p), x_bar - p> over it. The independent desk-scale oracle.
double brute_force_weak_gap(const ProblemInstance& inst, const Vector& x_bar, double grid_step);

// The feasible grid the brute-force oracle ranges over, exposed so probe
// sets can be made to coincide with it.
std::vector<Vector> feasible_grid(const ProblemInstance& inst, double grid_step);

// L(x_bar, lambda*) - L(x*, lambda_bar) for the KKT Lagrangian
// L(x, l) = <F(x*), x> + <l, g(x)>; nonnegative at feasible multipliers by
// the saddle property. Requires a known solution.
double lagrangian_gap(const ProblemInstance& inst, const Vector& x_bar, const Vector& lambda_bar);

struct ProbeOptions {
  int n_random = 64;
  std::uint64_t seed = 0x9d2c5680;
  std::size_t max_attempts = 200000;
};

// Default probe set: x* when known, the feasible analytic extreme points of
// the set, and seeded rejection-sampled feasible points.
std::vector<Vector> default_probes(const ProblemInstance& inst, const ProbeOptions& opts = {});

// Criteria callback for run_solver: (infeasibility, restricted gap over the
// given probes).
std::function<std::pair<double, double>(const Vector&)> make_criteria(
    const ProblemInstance& inst, std::vector<Vector> probes);
std::function<std::pair<double, double>(const Vector&)> make_default_criteria(
    const ProblemInstance& inst);

}  // namespace fcvi
