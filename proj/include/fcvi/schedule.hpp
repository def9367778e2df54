// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fcvi/oracle.hpp"
#include "fcvi/problem.hpp"

namespace fcvi {

// Per-iteration step parameters. Every policy keeps
//   gamma_t * theta_t = gamma_{t-1},
//   gamma_t * eta_t and gamma_t * tau_t nonincreasing in t.
struct StepParams {
  double gamma;
  double theta;
  double eta;
  double tau;
};

enum class EtaMode { Sum, Max };

// A named step-size policy. The four B-policies are constant in t; the
// adaptive policy recomputes eta_t online from the running multiplier-norm
// maximum, so its accessor takes that feedback plus the previous eta.
class StepSchedule {
 public:
  enum class Kind { Constant, Adaptive };

  std::string policy_name;
  Kind kind = Kind::Constant;

  // constant policies
  double eta_const = 0.0;
  double tau_const = 0.0;

  // adaptive policy
  double c1 = 0.0, c2 = 0.0, beta = 0.0;
  double L = 0.0, L_g = 0.0;

  // recorded parameters
  double B = 0.0;
  double c = 0.0;
  long horizon = 0;
  EtaMode mode = EtaMode::Sum;

  // prev_eta <= 0 marks t = 0. For the adaptive policy theta_t is the exact
  // double quotient gamma_{t-1}/gamma_t, which is the constructible form of
  // the product identity.
  StepParams params(long t, double lambda_norm_max, double prev_eta) const;

  bool adaptive() const { return kind == Kind::Adaptive; }
  double eta0() const;
};

struct PolicyParams {
  double B = 1.0;
  long T = 0;
  double c = -1.0;  // < 0 means "use the default rule"
  EtaMode mode = EtaMode::Sum;
  double c1 = 6.0;
  double c2 = 6.0;
};

// Builds one of the five shipped policies from instance metadata:
//   det_known_lambda  constant, B = ||lambda*|| + 1 (requires known solution)
//   det_B             constant, caller-supplied B >= 1
//   stoch_B           constant, accounts for operator noise sigma_F
//   fully_stoch_B     constant, accounts for operator and constraint noise
//   adaptive          eta_t = c1 L + c2 L_g max_i ||lambda^i||, gamma_t = eta_0/eta_t
// The robustness constant c adds c*sqrt(T) to eta; when unset it defaults to
// L_g * D_X for a smooth noise-free det_B setup and 0 otherwise.
StepSchedule make_policy(const std::string& name, const ProblemInstance& inst,
                         const PolicyParams& params,
                         const StochasticOracleSpec& noise = {});

}  // namespace fcvi
