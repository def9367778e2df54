// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fcvi/types.hpp"

namespace fcvi {

// One checkpoint: the ergodic average after t iterations, scored by the two
// convergence criteria, plus the live multiplier norm and step size.
struct TraceRecord {
  long t = 0;
  double gamma_sum = 0.0;
  double infeasibility = 0.0;
  double gap_restricted = 0.0;
  double lambda_norm = 0.0;
  double eta = 0.0;
  double wall_s = 0.0;
};

struct ConvergenceTrace {
  std::string instance_label;
  std::string method;
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;

  // Header: t,gamma_sum,infeas,gap_restricted,lambda_norm,eta,wall_s
  std::string to_csv() const;
  static ConvergenceTrace from_csv(const std::string& text);
};

enum class ErrorChannel { Infeasibility, GapRestricted };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-space fit residuals, never hidden
  ErrorChannel channel = ErrorChannel::Infeasibility;
  int points_used = 0;
};

// Least-squares slope of log(error) against log(t). Checkpoints at or below
// the 1e-13 floating-point floor are dropped; fewer than four usable points
// is an error.
RateFit fit_rate_points(const std::vector<double>& ts, const std::vector<double>& errors,
                        ErrorChannel channel);

// Fits on the last ceil(tail_fraction * K) checkpoints of the trace.
RateFit fit_rate(const ConvergenceTrace& trace, ErrorChannel channel, double tail_fraction);

// Fits on all trace checkpoints with t >= t_min.
RateFit fit_rate_from(const ConvergenceTrace& trace, ErrorChannel channel, long t_min);

// Geometric checkpoint grid {1, 2, 4, ...} up to and including T.
std::vector<long> checkpoint_grid(long T);

}  // namespace fcvi
