// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "fcvi/problem.hpp"

namespace fcvi {

enum class NoiseShape { Gaussian, BoundedUniform };
enum class StreamKind : std::uint64_t { Primary = 0, Bar = 1 };

// Noise model wrapping a deterministic instance:
//   operator draw       F(x) + e,      E||e||^2 <= sigma_F^2
//   constraint values   g(x) + e_g,    E||e_g||^2 <= sigma_g^2
//   constraint grads    col_j + e_j,   E||e_j||^2 <= sigma_Gamma[j]^2
// Gaussian meets the variance bounds in expectation; bounded_uniform also
// meets them almost surely. All randomness is a counter-based pure function
// of (master_seed, t, stream, draw_index, component), so a run is a
// deterministic function of the master seed and the same iteration stream
// can be re-applied at several evaluation points, which is how the bar
// stream's single sample enters two linearization points.
struct StochasticOracleSpec {
  double sigma_F = 0.0;
  double sigma_g = 0.0;
  Vector sigma_Gamma;  // per-constraint; empty means all zero
  NoiseShape shape = NoiseShape::Gaussian;
  std::uint64_t master_seed = 0;

  void validate(Eigen::Index num_constraints) const;
  bool operator_noise_free() const { return sigma_F == 0.0; }
  bool constraint_noise_free() const {
    return sigma_g == 0.0 && (sigma_Gamma.size() == 0 || (sigma_Gamma.array() == 0).all());
  }
  bool noise_free() const { return operator_noise_free() && constraint_noise_free(); }
};

struct ConstraintSample {
  Vector values;    // m
  Matrix jacobian;  // n x m
};

struct OracleCallCounts {
  long operator_draws = 0;
  long constraint_draws = 0;
};

// One realized constraint-noise sample (one xi). Applying it at different
// points models evaluating the stochastic oracle at those points under the
// same random input.
struct ConstraintNoise {
  Vector values;    // m
  Matrix jacobian;  // n x m
  bool zero = true;
};

// Per-run sampling frontend. Values are pure in (x, t, stream, draw);
// the embedded call counter only records how many draws a run consumed.
class OracleSampler {
 public:
  OracleSampler(const ProblemInstance& inst, const StochasticOracleSpec& spec);

  Vector sample_operator(const Vector& x, long t, StreamKind which, long draw = 0);
  ConstraintSample sample_constraints(const Vector& x, long t, StreamKind which, long draw = 0);

  ConstraintNoise constraint_noise(long t, StreamKind which, long draw = 0);
  ConstraintSample apply_noise(const ConstraintNoise& noise, const Vector& g_exact,
                               const Matrix& jac_exact) const;

  const OracleCallCounts& counts() const { return counts_; }
  const StochasticOracleSpec& spec() const { return spec_; }

 private:
  const ProblemInstance& inst_;
  StochasticOracleSpec spec_;
  OracleCallCounts counts_;
};

// Stochastic first-order model of g built from one bar-stream sample at
// x_prev; unbiased for the deterministic linearization at fixed points.
Vector stochastic_linearize(const Vector& g_sample, const Matrix& jac_sample,
                            const Vector& x_prev, const Vector& x);

}  // namespace fcvi
