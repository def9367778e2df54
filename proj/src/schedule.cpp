// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace fcvi {

double StepSchedule::eta0() const {
  return kind == Kind::Constant ? eta_const : c1 * L;
}

StepParams StepSchedule::params(long t, double lambda_norm_max, double prev_eta) const {
  if (kind == Kind::Constant) return {1.0, 1.0, eta_const, tau_const};
  const double eta = c1 * L + c2 * L_g * lambda_norm_max;
  const double gamma = (c1 * L) / eta;
  double theta = 1.0;
  if (t > 0 && prev_eta > 0) {
    const double gamma_prev = (c1 * L) / prev_eta;
    theta = gamma_prev / gamma;
  }
  // tau_t = beta * eta_t; with no constraints beta degenerates, and tau is
  // never consumed, so keep it positive for the schedule contract.
  const double tau = beta > 0 ? beta * eta : eta;
  return {gamma, theta, eta, tau};
}

namespace {

double sum_or_max(EtaMode mode, std::initializer_list<double> terms) {
  double acc = 0.0;
  for (double v : terms) acc = mode == EtaMode::Sum ? acc + v : std::max(acc, v);
  return acc;
}

double default_robustness_c(const std::string& name, const ProblemInstance& inst,
                            const StochasticOracleSpec& noise) {
  // Only the uninformed deterministic policy on a smooth noise-free problem
  // risks the stalled regime the c*sqrt(T) term repairs.
  if (name == "det_B" && inst.H() == 0 && inst.H_g() == 0 && noise.noise_free())
    return inst.L_g() * inst.D_X();
  return 0.0;
}

}  // namespace

StepSchedule make_policy(const std::string& name, const ProblemInstance& inst,
                         const PolicyParams& params, const StochasticOracleSpec& noise) {
  StepSchedule s;
  s.policy_name = name;
  s.mode = params.mode;
  s.horizon = params.T;

  const double L = inst.L();
  const double H = inst.H();
  const double Lg = inst.L_g();
  const double Hg = inst.H_g();
  const double Mg = inst.M_g();
  const double D = inst.D_X();

  if (name == "adaptive") {
    if (params.mode == EtaMode::Max)
      throw ConfigError("policy adaptive: eta mode max is not applicable");
    if (!(L > 0)) throw ConfigError("policy adaptive: requires L > 0");
    if (params.c1 / 3.0 < params.c1 / params.c2 + 1.0 - 1e-12)
      throw ConfigError("policy adaptive: constants must satisfy c1/3 >= c1/c2 + 1");
    s.kind = StepSchedule::Kind::Adaptive;
    s.c1 = params.c1;
    s.c2 = params.c2;
    s.L = L;
    s.L_g = Lg;
    s.beta = Mg > 0 ? 12.0 * Mg * Mg / (params.c1 * params.c1 * L * L) : 0.0;
    return s;
  }

  if (!(D > 0)) throw ConfigError("policy " + name + ": degenerate set with D_X = 0");
  if (params.T < 1) throw ConfigError("policy " + name + ": needs a horizon T >= 1");
  s.kind = StepSchedule::Kind::Constant;

  double B = params.B;
  if (name == "det_known_lambda") {
    if (!inst.known_solution())
      throw ConfigError("policy det_known_lambda: instance has no known multiplier");
    B = inst.known_solution()->lambda_star.norm() + 1.0;
  } else if (name == "det_B" || name == "stoch_B" || name == "fully_stoch_B") {
    if (B < 1.0) throw ConfigError("policy " + name + ": requires B >= 1");
  } else {
    throw ConfigError("unknown policy '" + name + "'");
  }
  s.B = B;
  s.c = params.c >= 0 ? params.c : default_robustness_c(name, inst, noise);

  const double sqrtT = std::sqrt(static_cast<double>(params.T));
  double eta = 0.0, tau = 0.0;
  if (name == "det_known_lambda" || name == "det_B") {
    eta = sum_or_max(params.mode,
                     {6.0 * L, 6.0 * Mg * B / D, H * std::sqrt(3.0 * params.T) / D,
                      Hg * B * std::sqrt(3.0 * params.T) / D});
    tau = Mg > 0 ? 6.0 * Mg * D / B : 1.0;
  } else if (name == "stoch_B") {
    if (params.mode == EtaMode::Max)
      throw ConfigError("policy stoch_B: eta mode max is stated for the deterministic "
                        "policies only");
    eta = 8.0 * L + 5.0 * Mg * B / D +
          2.0 * (H + Hg * B + std::sqrt(3.0) * noise.sigma_F) * sqrtT / D;
    tau = Mg > 0 ? 6.0 * Mg * D / B : 1.0;
  } else {  // fully_stoch_B
    if (params.mode == EtaMode::Max)
      throw ConfigError("policy fully_stoch_B: eta mode max is stated for the deterministic "
                        "policies only");
    const double sG = noise.sigma_Gamma.size() ? noise.sigma_Gamma.norm() : 0.0;
    const double sXg = std::sqrt(noise.sigma_g * noise.sigma_g + D * D * sG * sG);
    eta = 8.0 * L + 8.0 * Mg * B / D +
          2.0 * (H + Hg * B + std::sqrt(2.0) * noise.sigma_F + 4.0 * B * sG) * sqrtT / D;
    tau = 9.0 * D / B * std::max(Mg, sG) + 8.0 * sXg * sqrtT / B;
    if (!(tau > 0)) tau = 1.0;
  }
  eta += s.c * sqrtT;
  s.eta_const = Lg * B + eta;
  s.tau_const = tau;
  if (!(s.eta_const > 0))
    throw ConfigError("policy " + name + ": produced a nonpositive eta");
  return s;
}

}  // namespace fcvi
