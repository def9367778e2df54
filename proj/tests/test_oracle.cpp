// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fcvi/oracle.hpp"
#include "support/instances.hpp"

using namespace fcvi;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

StochasticOracleSpec spec_with(double sF, double sg, double sGamma, std::uint64_t seed,
                               Eigen::Index m, NoiseShape shape = NoiseShape::Gaussian) {
  StochasticOracleSpec s;
  s.sigma_F = sF;
  s.sigma_g = sg;
  if (sGamma > 0) s.sigma_Gamma = Vector::Constant(m, sGamma);
  s.shape = shape;
  s.master_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("zero noise returns exact values bit for bit") {
  const auto inst = testing::qc1();
  OracleSampler sampler(inst, spec_with(0, 0, 0, 42, 1));
  const Vector x = vec2(0.3, -0.4);
  CHECK(sampler.sample_operator(x, 7, StreamKind::Primary) == inst.operator_value(x));
  const auto cs = sampler.sample_constraints(x, 7, StreamKind::Bar);
  CHECK(cs.values == inst.constraint_values(x));
  CHECK(cs.jacobian == inst.constraint_jacobian(x));
}

TEST_CASE("same (x, t, stream, draw) gives identical output") {
  const auto inst = testing::qc1();
  const auto spec = spec_with(0.5, 0.3, 0.2, 1234, 1);
  OracleSampler a(inst, spec);
  OracleSampler b(inst, spec);
  const Vector x = vec2(0.1, 0.2);
  CHECK(a.sample_operator(x, 3, StreamKind::Primary, 5) ==
        b.sample_operator(x, 3, StreamKind::Primary, 5));
  const auto ca = a.sample_constraints(x, 9, StreamKind::Bar, 2);
  const auto cb = b.sample_constraints(x, 9, StreamKind::Bar, 2);
  CHECK(ca.values == cb.values);
  CHECK(ca.jacobian == cb.jacobian);
}

TEST_CASE("operator draws are unbiased at the 4-sigma level") {
  const auto inst = testing::qc1();
  const double sigma = 0.5;
  const int N = 100000;
  const Vector x = vec2(0.25, -0.5);
  const Vector truth = inst.operator_value(x);
  for (const auto shape : {NoiseShape::Gaussian, NoiseShape::BoundedUniform}) {
    OracleSampler sampler(inst, spec_with(sigma, 0, 0, 2024, 1, shape));
    Vector mean = Vector::Zero(2);
    for (int k = 0; k < N; ++k) mean += sampler.sample_operator(x, 0, StreamKind::Primary, k);
    mean /= N;
    CHECK((mean - truth).norm() <= 4.0 * sigma / std::sqrt(double(N)));
  }
}

TEST_CASE("bounded uniform noise respects the almost-sure bound") {
  const auto inst = testing::qc1();
  const double sigma = 0.4;
  OracleSampler sampler(inst, spec_with(sigma, 0, 0, 9, 1, NoiseShape::BoundedUniform));
  const Vector x = vec2(0.0, 0.0);
  const Vector truth = inst.operator_value(x);
  for (int k = 0; k < 2000; ++k) {
    const double dev = (sampler.sample_operator(x, 0, StreamKind::Primary, k) - truth).norm();
    CHECK(dev <= sigma + 1e-12);
  }
}

TEST_CASE("constraint value draws are unbiased at the 4-sigma level") {
  const auto inst = testing::qc1();
  const double sigma_g = 0.3;
  const int N = 100000;
  const Vector x = vec2(0.1, 0.6);
  const Vector truth = inst.constraint_values(x);
  OracleSampler sampler(inst, spec_with(0, sigma_g, 0, 77, 1));
  Vector mean = Vector::Zero(1);
  for (int k = 0; k < N; ++k)
    mean += sampler.sample_constraints(x, 0, StreamKind::Primary, k).values;
  mean /= N;
  CHECK((mean - truth).norm() <= 4.0 * sigma_g / std::sqrt(double(N)));
}

TEST_CASE("primary and bar streams are uncorrelated across iterations") {
  const auto inst = testing::qc1();
  OracleSampler sampler(inst, spec_with(0, 0.5, 0, 31337, 1));
  const Vector x = vec2(0.0, 0.0);
  const Vector truth = inst.constraint_values(x);
  const int N = 10000;
  double sp = 0, sb = 0, spp = 0, sbb = 0, spb = 0;
  for (int t = 0; t < N; ++t) {
    const double p = (sampler.sample_constraints(x, t, StreamKind::Primary).values - truth)[0];
    const double b = (sampler.sample_constraints(x, t, StreamKind::Bar).values - truth)[0];
    sp += p;
    sb += b;
    spp += p * p;
    sbb += b * b;
    spb += p * b;
  }
  const double cov = spb / N - (sp / N) * (sb / N);
  const double var_p = spp / N - (sp / N) * (sp / N);
  const double var_b = sbb / N - (sb / N) * (sb / N);
  const double corr = cov / std::sqrt(var_p * var_b);
  CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("operator and jacobian draws at one (t, stream) are independent") {
  // The per-component tags split the key space, standing in for distinct
  // draw indices within one primary stream.
  const auto inst = testing::qq1();
  OracleSampler sampler(inst, spec_with(0.5, 0, 0.5, 2717, 1));
  const Vector x = vec2(0.2, 0.2);
  const Vector f_truth = inst.operator_value(x);
  const Matrix j_truth = inst.constraint_jacobian(x);
  const int N = 10000;
  double sf = 0, sj = 0, sff = 0, sjj = 0, sfj = 0;
  for (int t = 0; t < N; ++t) {
    const double f = (sampler.sample_operator(x, t, StreamKind::Primary) - f_truth)[0];
    const double j =
        (sampler.sample_constraints(x, t, StreamKind::Primary).jacobian - j_truth)(0, 0);
    sf += f;
    sj += j;
    sff += f * f;
    sjj += j * j;
    sfj += f * j;
  }
  const double corr = (sfj / N - (sf / N) * (sj / N)) /
                      std::sqrt((sff / N - (sf / N) * (sf / N)) * (sjj / N - (sj / N) * (sj / N)));
  CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("stochastic linearization") {
  const auto inst = testing::qq1();
  const Vector x_prev = vec2(0.5, -0.25);
  const Vector x = vec2(-0.3, 0.4);
  const Vector g_prev = inst.constraint_values(x_prev);
  const Matrix jac_prev = inst.constraint_jacobian(x_prev);

  SUBCASE("zero noise equals the deterministic linearization") {
    OracleSampler sampler(inst, spec_with(0, 0, 0, 5, 1));
    const auto cs = sampler.sample_constraints(x_prev, 4, StreamKind::Bar);
    CHECK(stochastic_linearize(cs.values, cs.jacobian, x_prev, x) ==
          linearize_constraints(g_prev, jac_prev, x_prev, x));
  }
  SUBCASE("zero displacement returns the sampled values") {
    OracleSampler sampler(inst, spec_with(0, 0.4, 0.4, 6, 1));
    const auto cs = sampler.sample_constraints(x_prev, 4, StreamKind::Bar);
    CHECK(stochastic_linearize(cs.values, cs.jacobian, x_prev, x_prev) == cs.values);
  }
  SUBCASE("Monte-Carlo mean approaches the deterministic linearization") {
    const double sigma_g = 0.3, sigma_G = 0.25;
    OracleSampler sampler(inst, spec_with(0, sigma_g, sigma_G, 99, 1));
    const Vector truth = linearize_constraints(g_prev, jac_prev, x_prev, x);
    const int N = 100000;
    Vector mean = Vector::Zero(1);
    for (int k = 0; k < N; ++k) {
      const auto cs = sampler.sample_constraints(x_prev, 0, StreamKind::Bar, k);
      mean += stochastic_linearize(cs.values, cs.jacobian, x_prev, x);
    }
    mean /= N;
    const double tol =
        4.0 * (sigma_g + (x - x_prev).norm() * sigma_G) / std::sqrt(double(N));
    CHECK((mean - truth).norm() <= tol);
  }
}

TEST_CASE("one noise realization can be applied at two points") {
  const auto inst = testing::qc1();
  OracleSampler sampler(inst, spec_with(0, 0.5, 0.5, 11, 1));
  const auto noise = sampler.constraint_noise(8, StreamKind::Bar);
  const Vector x1 = vec2(0.4, 0.1), x2 = vec2(-0.2, 0.3);
  const auto s1 = sampler.apply_noise(noise, inst.constraint_values(x1), inst.constraint_jacobian(x1));
  const auto s2 = sampler.apply_noise(noise, inst.constraint_values(x2), inst.constraint_jacobian(x2));
  // identical deviation from the exact values at both points
  CHECK(((s1.values - inst.constraint_values(x1)) - (s2.values - inst.constraint_values(x2)))
            .norm() <= 1e-12);
  CHECK(((s1.jacobian - inst.constraint_jacobian(x1)) -
         (s2.jacobian - inst.constraint_jacobian(x2)))
            .norm() <= 1e-12);
  CHECK((s1.values - inst.constraint_values(x1) - noise.values).norm() <= 1e-12);
}

TEST_CASE("negative noise parameters are rejected") {
  StochasticOracleSpec bad;
  bad.sigma_F = -0.1;
  CHECK_THROWS_AS(bad.validate(1), ConfigError);
}
