// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/oracle.hpp"

#include <cmath>

namespace fcvi {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// Component tags keep the operator, value and Jacobian draws of one
// iteration statistically independent even at equal draw indices.
constexpr std::uint64_t kTagOperator = 0x0f;
constexpr std::uint64_t kTagValues = 0xf0;
constexpr std::uint64_t kTagJacobian = 0xff;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, long t, StreamKind which, long draw,
                         std::uint64_t tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(t));
  h = splitmix64(h ^ static_cast<std::uint64_t>(which));
  h = splitmix64(h ^ static_cast<std::uint64_t>(draw));
  h = splitmix64(h ^ tag);
  return h;
}

double uniform01(std::uint64_t key, std::uint64_t lane) {
  // in (0, 1], so it is safe inside a log
  const std::uint64_t bits = splitmix64(key + lane * kGamma);
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// iid standard lanes: N(0,1) via Box-Muller, or U[-1,1] scaled so that a
// block of k lanes with weight s/sqrt(k) keeps ||noise|| <= s surely.
Vector standard_lanes(std::uint64_t key, Eigen::Index count, NoiseShape shape) {
  Vector out(count);
  if (shape == NoiseShape::Gaussian) {
    for (Eigen::Index i = 0; i < count; i += 2) {
      const double u1 = uniform01(key, static_cast<std::uint64_t>(i));
      const double u2 = uniform01(key, static_cast<std::uint64_t>(i) + 1);
      const double r = std::sqrt(-2.0 * std::log(u1));
      out[i] = r * std::cos(2.0 * M_PI * u2);
      if (i + 1 < count) out[i + 1] = r * std::sin(2.0 * M_PI * u2);
    }
  } else {
    for (Eigen::Index i = 0; i < count; ++i)
      out[i] = 2.0 * uniform01(key, static_cast<std::uint64_t>(i)) - 1.0;
  }
  return out;
}

}  // namespace

void StochasticOracleSpec::validate(Eigen::Index num_constraints) const {
  if (sigma_F < 0 || sigma_g < 0 || (sigma_Gamma.size() && (sigma_Gamma.array() < 0).any()))
    throw ConfigError("oracle: noise parameters must be nonnegative");
  if (sigma_Gamma.size() != 0 && sigma_Gamma.size() != num_constraints)
    throw ConfigError("oracle: sigma_Gamma must have one entry per constraint");
}

OracleSampler::OracleSampler(const ProblemInstance& inst, const StochasticOracleSpec& spec)
    : inst_(inst), spec_(spec) {
  spec_.validate(inst.num_constraints());
}

Vector OracleSampler::sample_operator(const Vector& x, long t, StreamKind which, long draw) {
  ++counts_.operator_draws;
  Vector value = inst_.operator_value(x);
  if (spec_.operator_noise_free()) return value;
  const Eigen::Index n = value.size();
  const std::uint64_t key = derive_key(spec_.master_seed, t, which, draw, kTagOperator);
  value += (spec_.sigma_F / std::sqrt(static_cast<double>(n))) *
           standard_lanes(key, n, spec_.shape);
  return value;
}

ConstraintNoise OracleSampler::constraint_noise(long t, StreamKind which, long draw) {
  ++counts_.constraint_draws;
  ConstraintNoise noise;
  const Eigen::Index n = inst_.dim();
  const Eigen::Index m = inst_.num_constraints();
  noise.values = Vector::Zero(m);
  noise.jacobian = Matrix::Zero(n, m);
  if (spec_.constraint_noise_free() || m == 0) return noise;
  noise.zero = false;
  if (spec_.sigma_g > 0) {
    const std::uint64_t key = derive_key(spec_.master_seed, t, which, draw, kTagValues);
    noise.values = (spec_.sigma_g / std::sqrt(static_cast<double>(m))) *
                   standard_lanes(key, m, spec_.shape);
  }
  if (spec_.sigma_Gamma.size()) {
    const std::uint64_t key = derive_key(spec_.master_seed, t, which, draw, kTagJacobian);
    const Vector lanes = standard_lanes(key, n * m, spec_.shape);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (spec_.sigma_Gamma[j] == 0.0) continue;
      noise.jacobian.col(j) = (spec_.sigma_Gamma[j] / std::sqrt(static_cast<double>(n))) *
                              lanes.segment(j * n, n);
    }
  }
  return noise;
}

ConstraintSample OracleSampler::apply_noise(const ConstraintNoise& noise, const Vector& g_exact,
                                            const Matrix& jac_exact) const {
  if (noise.zero) return {g_exact, jac_exact};
  return {g_exact + noise.values, jac_exact + noise.jacobian};
}

ConstraintSample OracleSampler::sample_constraints(const Vector& x, long t, StreamKind which,
                                                   long draw) {
  const ConstraintNoise noise = constraint_noise(t, which, draw);
  return apply_noise(noise, inst_.constraint_values(x), inst_.constraint_jacobian(x));
}

Vector stochastic_linearize(const Vector& g_sample, const Matrix& jac_sample,
                            const Vector& x_prev, const Vector& x) {
  return linearize_constraints(g_sample, jac_sample, x_prev, x);
}

}  // namespace fcvi
