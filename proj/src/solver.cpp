// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/solver.hpp"

#include <chrono>
#include <cmath>

namespace fcvi {

Method method_from_name(const std::string& name) {
  if (name == "opconex") return Method::OpConEx;
  if (name == "stopconex") return Method::StOpConEx;
  if (name == "fstopconex") return Method::FStOpConEx;
  if (name == "adlagex") return Method::AdLagEx;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::OpConEx:
      return "opconex";
    case Method::StOpConEx:
      return "stopconex";
    case Method::FStOpConEx:
      return "fstopconex";
    case Method::AdLagEx:
      return "adlagex";
  }
  return "?";
}

Vector prox_dual(const Vector& lambda, const Vector& s, double tau) {
  if (!(tau > 0)) throw InputError("prox_dual: tau must be positive");
  require_dim(s, lambda.size(), "prox_dual");
  return (lambda + s / tau).cwiseMax(0.0);
}

Vector prox_primal(const Vector& x, const Vector& d, double eta, const SimpleSet& set) {
  if (!(eta > 0)) throw InputError("prox_primal: eta must be positive");
  require_dim(d, x.size(), "prox_primal");
  return set.project(x - d / eta);
}

Vector SolverState::ergodic_x() const {
  if (!(gamma_sum > 0)) throw InputError("ergodic average requested before any step");
  return erg_x / gamma_sum;
}

Vector SolverState::ergodic_lambda() const {
  if (!(gamma_sum > 0)) throw InputError("ergodic average requested before any step");
  return erg_lambda / gamma_sum;
}

SolverState init_state(const ProblemInstance& inst, const Vector& x0) {
  require_dim(x0, inst.dim(), "init_state x0");
  SolverState s;
  s.x = inst.set().project(x0);
  s.x_prev = s.x;
  s.x_prev2 = s.x;
  s.lambda = Vector::Zero(inst.num_constraints());
  s.lambda_prev = s.lambda;
  s.g_prev = inst.constraint_values(s.x);
  s.g_prev2 = s.g_prev;
  s.jac_prev = inst.constraint_jacobian(s.x);
  s.jac_prev2 = s.jac_prev;
  s.erg_x = Vector::Zero(inst.dim());
  s.erg_lambda = Vector::Zero(inst.num_constraints());
  return s;
}

namespace {

void check_finite(const Vector& v, const char* what, long t) {
  if (!v.allFinite())
    throw NumericalError(std::string("non-finite ") + what + " produced", t);
}

void finish_step(SolverState& state, const StepParams& p, Vector&& x_next,
                 Vector&& lambda_next, Vector&& g_curr, Matrix&& jac_curr, Vector&& op_curr) {
  state.x_prev2 = std::move(state.x_prev);
  state.x_prev = state.x;
  state.x = std::move(x_next);
  state.g_prev2 = std::move(state.g_prev);
  state.g_prev = std::move(g_curr);
  state.jac_prev2 = std::move(state.jac_prev);
  state.jac_prev = std::move(jac_curr);
  state.op_prev = std::move(op_curr);
  state.lambda_prev = std::move(state.lambda);
  state.lambda = std::move(lambda_next);
  state.erg_x += p.gamma * state.x;
  state.erg_lambda += p.gamma * state.lambda;
  state.gamma_sum += p.gamma;
  ++state.t;
}

enum class OperatorSource { Exact, Sampled };
enum class ConstraintSource { Exact, Sampled };

// Shared body of the three extrapolation methods. The dual step uses the
// linearization of g at the previous iterate evaluated at the current and
// previous points; the primal step combines the extrapolated operator with
// the Jacobian at the current point weighted by the fresh multiplier.
void conex_step(const ProblemInstance& inst, OracleSampler* oracle, SolverState& state,
                const StepParams& p, OperatorSource op_src, ConstraintSource con_src) {
  const long t = state.t;

  Vector ell_curr, ell_prev;
  if (con_src == ConstraintSource::Sampled) {
    const ConstraintNoise bar = oracle->constraint_noise(t, StreamKind::Bar);
    const ConstraintSample at_prev = oracle->apply_noise(bar, state.g_prev, state.jac_prev);
    const ConstraintSample at_prev2 = oracle->apply_noise(bar, state.g_prev2, state.jac_prev2);
    ell_curr = stochastic_linearize(at_prev.values, at_prev.jacobian, state.x_prev, state.x);
    ell_prev =
        stochastic_linearize(at_prev2.values, at_prev2.jacobian, state.x_prev2, state.x_prev);
  } else {
    ell_curr = linearize_constraints(state.g_prev, state.jac_prev, state.x_prev, state.x);
    ell_prev = linearize_constraints(state.g_prev2, state.jac_prev2, state.x_prev2, state.x_prev);
  }
  const Vector s = (1.0 + p.theta) * ell_curr - p.theta * ell_prev;
  Vector lambda_next = prox_dual(state.lambda, s, p.tau);
  check_finite(lambda_next, "multiplier", t);

  Vector op_curr = op_src == OperatorSource::Sampled
                       ? oracle->sample_operator(state.x, t, StreamKind::Primary)
                       : inst.operator_value(state.x);
  if (t == 0) state.op_prev = op_curr;  // x^{-1} = x^0 seeds the extrapolation

  Vector g_curr = inst.constraint_values(state.x);
  Matrix jac_curr = inst.constraint_jacobian(state.x);
  Matrix jac_primal;
  if (con_src == ConstraintSource::Sampled) {
    const ConstraintNoise primary = oracle->constraint_noise(t, StreamKind::Primary);
    jac_primal = oracle->apply_noise(primary, g_curr, jac_curr).jacobian;
  } else {
    jac_primal = jac_curr;
  }

  const Vector d = (1.0 + p.theta) * op_curr - p.theta * state.op_prev + jac_primal * lambda_next;
  Vector x_next = prox_primal(state.x, d, p.eta, inst.set());
  check_finite(x_next, "iterate", t);

  finish_step(state, p, std::move(x_next), std::move(lambda_next), std::move(g_curr),
              std::move(jac_curr), std::move(op_curr));
}

}  // namespace

void opconex_step(const ProblemInstance& inst, SolverState& state, const StepParams& p) {
  conex_step(inst, nullptr, state, p, OperatorSource::Exact, ConstraintSource::Exact);
}

void stopconex_step(const ProblemInstance& inst, OracleSampler& oracle, SolverState& state,
                    const StepParams& p) {
  conex_step(inst, &oracle, state, p, OperatorSource::Sampled, ConstraintSource::Exact);
}

void fstopconex_step(const ProblemInstance& inst, OracleSampler& oracle, SolverState& state,
                     const StepParams& p) {
  conex_step(inst, &oracle, state, p, OperatorSource::Sampled, ConstraintSource::Sampled);
}

void adlagex_step(const ProblemInstance& inst, SolverState& state, const StepParams& p) {
  const long t = state.t;
  Vector g_curr = inst.constraint_values(state.x);
  Matrix jac_curr = inst.constraint_jacobian(state.x);
  Vector op_curr = inst.operator_value(state.x);
  const Vector lag_grad = op_curr + jac_curr * state.lambda;
  if (t == 0) {
    // x^{-1} = x^0 and lambda^{-1} = lambda^0 = 0, so both extrapolation
    // differences vanish on the first iteration.
    state.g_prev = g_curr;
    state.lag_grad_prev = lag_grad;
  }

  // The two prox updates are data-independent and could run in parallel.
  const Vector s = (1.0 + p.theta) * g_curr - p.theta * state.g_prev;
  Vector lambda_next = prox_dual(state.lambda, s, p.tau);
  check_finite(lambda_next, "multiplier", t);

  const Vector q = (1.0 + p.theta) * lag_grad - p.theta * state.lag_grad_prev;
  Vector x_next = prox_primal(state.x, q, p.eta, inst.set());
  check_finite(x_next, "iterate", t);

  state.lag_grad_prev = lag_grad;
  finish_step(state, p, std::move(x_next), std::move(lambda_next), std::move(g_curr),
              std::move(jac_curr), std::move(op_curr));
}

RunResult run_solver(const ProblemInstance& inst, Method method, const StepSchedule& schedule,
                     long T, const StochasticOracleSpec& noise, const Vector& x0,
                     const RunOptions& options) {
  if (T < 1) throw ConfigError("run_solver: T must be >= 1");
  if (schedule.adaptive() != (method == Method::AdLagEx))
    throw ConfigError("run_solver: the adaptive policy pairs with adlagex and the constant "
                      "policies with the extrapolation methods");
  if (!options.criteria) throw ConfigError("run_solver: criteria callback missing");

  SolverState state = init_state(inst, x0);
  OracleSampler sampler(inst, noise);

  const auto t0 = std::chrono::steady_clock::now();
  auto checkpoints = options.checkpoints.empty() ? checkpoint_grid(T) : options.checkpoints;
  std::size_t next_cp = 0;

  RunResult result;
  result.trace.instance_label = inst.label();
  result.trace.method = method_name(method);
  result.trace.policy = schedule.policy_name;
  result.trace.seed = noise.master_seed;

  for (long t = 0; t < T; ++t) {
    state.lambda_norm_max = std::max(state.lambda_norm_max, state.lambda.norm());
    const StepParams p = schedule.params(t, state.lambda_norm_max, state.prev_eta);
    switch (method) {
      case Method::OpConEx:
        opconex_step(inst, state, p);
        break;
      case Method::StOpConEx:
        stopconex_step(inst, sampler, state, p);
        break;
      case Method::FStOpConEx:
        fstopconex_step(inst, sampler, state, p);
        break;
      case Method::AdLagEx:
        adlagex_step(inst, state, p);
        break;
    }
    state.prev_eta = p.eta;
    if (options.on_iterate) options.on_iterate(t, state);
    if (next_cp < checkpoints.size() && state.t == checkpoints[next_cp]) {
      const Vector x_bar = state.ergodic_x();
      const auto [infeas, gap] = options.criteria(x_bar);
      if (!(infeas >= 0) || !std::isfinite(gap))
        throw NumericalError("trace criteria produced an invalid record", t);
      TraceRecord rec;
      rec.t = state.t;
      rec.gamma_sum = state.gamma_sum;
      rec.infeasibility = infeas;
      rec.gap_restricted = gap;
      rec.lambda_norm = state.lambda.norm();
      rec.eta = p.eta;
      rec.wall_s = options.record_timing
                       ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                       : 0.0;
      result.trace.records.push_back(rec);
      ++next_cp;
    }
  }

  result.x_bar = state.ergodic_x();
  result.lambda_bar = state.ergodic_lambda();
  result.oracle_calls = sampler.counts();
  return result;
}

}  // namespace fcvi
