// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "fcvi/oracle.hpp"
#include "fcvi/problem.hpp"
#include "fcvi/schedule.hpp"
#include "fcvi/trace.hpp"

namespace fcvi {

enum class Method { OpConEx, StOpConEx, FStOpConEx, AdLagEx };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

// Closed form of argmin_{l >= 0} <-s, l> + tau/2 ||l - lambda||^2.
Vector prox_dual(const Vector& lambda, const Vector& s, double tau);

// project(x - d/eta), the argmin over the set of <d, .> + eta/2 ||. - x||^2.
Vector prox_primal(const Vector& x, const Vector& d, double eta, const SimpleSet& set);

// Iterates plus the one-step memory every method needs: the previous two
// points with their exact constraint data, the previous operator value (or
// draw), and for the adaptive method the previous Lagrangian gradient and
// multiplier with the running max of ||lambda^i||.
struct SolverState {
  long t = 0;
  Vector x, x_prev, x_prev2;
  Vector lambda, lambda_prev;
  Vector op_prev;
  Vector g_prev, g_prev2;
  Matrix jac_prev, jac_prev2;
  Vector lag_grad_prev;
  double lambda_norm_max = 0.0;
  double prev_eta = -1.0;
  Vector erg_x, erg_lambda;
  double gamma_sum = 0.0;

  Vector ergodic_x() const;
  Vector ergodic_lambda() const;
};

SolverState init_state(const ProblemInstance& inst, const Vector& x0);

// One iteration of each method. The stochastic variants draw from the
// sampler with the prescribed stream discipline: one primary operator draw
// per iteration; the fully stochastic method adds one primary constraint
// draw (its Jacobian feeds the primal step) and one bar constraint draw
// (one sample applied at both linearization points of the dual step).
void opconex_step(const ProblemInstance& inst, SolverState& state, const StepParams& p);
void stopconex_step(const ProblemInstance& inst, OracleSampler& oracle, SolverState& state,
                    const StepParams& p);
void fstopconex_step(const ProblemInstance& inst, OracleSampler& oracle, SolverState& state,
                     const StepParams& p);
void adlagex_step(const ProblemInstance& inst, SolverState& state, const StepParams& p);

struct RunOptions {
  // Scores an ergodic average: (infeasibility, restricted gap). Metrics
  // provides make_default_criteria; the trace requires finite values.
  std::function<std::pair<double, double>(const Vector&)> criteria;
  std::function<void(long t, const SolverState&)> on_iterate;
  bool record_timing = false;
  // Trace cadence; empty means the geometric grid {1, 2, 4, ...} plus T.
  std::vector<long> checkpoints;
};

struct RunResult {
  Vector x_bar;
  Vector lambda_bar;
  ConvergenceTrace trace;
  OracleCallCounts oracle_calls;
};

// Runs T iterations from x0 (projected onto the set) and returns the
// gamma-weighted ergodic averages plus a trace sampled on the geometric
// checkpoint grid. The policy must match the method: the adaptive schedule
// pairs with AdLagEx only.
RunResult run_solver(const ProblemInstance& inst, Method method, const StepSchedule& schedule,
                     long T, const StochasticOracleSpec& noise, const Vector& x0,
                     const RunOptions& options);

}  // namespace fcvi
