// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fcvi/schedule.hpp"
#include "support/instances.hpp"

using namespace fcvi;

namespace {

// A synthetic instance with round metadata: L = 1, M_g = 1, D_X = 2,
// H = H_g = L_g = 0.
ProblemInstance round_numbers_instance() {
  auto set = SimpleSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  auto op = OperatorSpec::affine(Matrix::Identity(1, 1), Vector::Zero(1));
  ConstraintSpec g({ConstraintTerm::affine(Vector::Constant(1, 1.0), -0.25)}, set);
  return ProblemInstance(std::move(set), std::move(op), std::move(g), std::nullopt, "round");
}

void check_constant_contract(const StepSchedule& s, long T) {
  double prev_gamma = -1, prev_eta = -1, prev_tau = -1, prev_eta_raw = -1;
  for (long t = 0; t < T; ++t) {
    const StepParams p = s.params(t, 0.0, prev_eta_raw);
    if (t > 0) {
      CHECK(p.gamma * p.theta == prev_gamma);  // exact for constant policies
      CHECK(p.gamma * p.eta <= prev_gamma * prev_eta + 1e-12);
      CHECK(p.gamma * p.tau <= prev_gamma * prev_tau + 1e-12);
    }
    prev_gamma = p.gamma;
    prev_eta = p.eta;
    prev_tau = p.tau;
    prev_eta_raw = p.eta;
  }
}

}  // namespace

TEST_CASE("det_B policy reproduces the closed-form step sizes") {
  const auto inst = round_numbers_instance();
  PolicyParams params;
  params.B = 2.0;
  params.T = 100;
  params.c = 0.0;
  const auto s = make_policy("det_B", inst, params);
  // eta = 6L + 6 M_g B / D = 6 + 6 = 12; tau = 6 M_g D / B = 6
  const auto p = s.params(0, 0, -1);
  CHECK(p.eta == doctest::Approx(12.0).epsilon(1e-15));  // L_g = 0, so eta_t = eta
  CHECK(p.tau == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(p.gamma == 1.0);
  CHECK(p.theta == 1.0);
  check_constant_contract(s, 200);
}

TEST_CASE("stoch_B policy includes the noise term") {
  const auto inst = round_numbers_instance();
  PolicyParams params;
  params.B = 2.0;
  params.T = 100;
  params.c = 0.0;
  StochasticOracleSpec noise;
  noise.sigma_F = 1.0;
  const auto s = make_policy("stoch_B", inst, params, noise);
  // eta = 8L + 5 M_g B / D + 2 sqrt(3) sigma sqrt(T) / D = 8 + 5 + 10 sqrt(3)
  const auto p = s.params(0, 0, -1);
  CHECK(p.eta == doctest::Approx(13.0 + 10.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(p.tau == doctest::Approx(6.0).epsilon(1e-15));
  check_constant_contract(s, 200);
}

TEST_CASE("fully stochastic policy folds in the constraint noise") {
  const auto inst = round_numbers_instance();
  PolicyParams params;
  params.B = 2.0;
  params.T = 400;
  params.c = 0.0;
  StochasticOracleSpec noise;
  noise.sigma_F = 0.3;
  noise.sigma_g = 0.3;
  noise.sigma_Gamma = Vector::Constant(1, 0.3);
  const auto s = make_policy("fully_stoch_B", inst, params, noise);
  const double D = 2.0, B = 2.0, sG = 0.3;
  const double sXg = std::sqrt(0.3 * 0.3 + D * D * sG * sG);
  const double eta = 8.0 + 8.0 * B / D +
                     2.0 * (std::sqrt(2.0) * 0.3 + 4.0 * B * sG) * 20.0 / D;
  const double tau = 9.0 * D / B * std::max(1.0, sG) + 8.0 * sXg * 20.0 / B;
  const auto p = s.params(0, 0, -1);
  CHECK(p.eta == doctest::Approx(eta).epsilon(1e-14));
  CHECK(p.tau == doctest::Approx(tau).epsilon(1e-14));
  check_constant_contract(s, 200);
}

TEST_CASE("det_known_lambda uses B = ||lambda*|| + 1") {
  const auto inst = testing::qc1();
  PolicyParams params;
  params.T = 100;
  const auto s = make_policy("det_known_lambda", inst, params);
  CHECK(s.B == doctest::Approx(2.0));
  const double L = std::sqrt(5.0), Mg = std::sqrt(2.0), D = 2.0 * std::sqrt(2.0);
  CHECK(s.params(0, 0, -1).eta == doctest::Approx(6.0 * L + 6.0 * Mg * 2.0 / D).epsilon(1e-14));
  CHECK(s.params(0, 0, -1).tau == doctest::Approx(6.0 * Mg * D / 2.0).epsilon(1e-14));
}

TEST_CASE("max mode takes the largest eta term") {
  const auto inst = testing::qc1_nonsmooth();  // H_g = 1 > 0
  PolicyParams params;
  params.B = 2.0;
  params.T = 10000;
  params.c = 0.0;
  params.mode = EtaMode::Max;
  const auto s = make_policy("det_B", inst, params);
  const double D = inst.D_X();
  const double expected = std::max({6.0 * inst.L(), 6.0 * inst.M_g() * 2.0 / D,
                                    inst.H_g() * 2.0 * std::sqrt(3.0e4) / D});
  CHECK(s.params(0, 0, -1).eta == doctest::Approx(inst.L_g() * 2.0 + expected).epsilon(1e-14));

  params.mode = EtaMode::Sum;
  const auto s2 = make_policy("det_B", inst, params);
  CHECK(s2.params(0, 0, -1).eta > s.params(0, 0, -1).eta);
}

TEST_CASE("robustness constant adds c sqrt(T)") {
  const auto inst = testing::qq1();
  PolicyParams params;
  params.B = 1.0;
  params.T = 10000;
  params.c = 0.0;
  const double base = make_policy("det_B", inst, params).params(0, 0, -1).eta;
  params.c = 2.5;
  const double bumped = make_policy("det_B", inst, params).params(0, 0, -1).eta;
  CHECK(bumped == doctest::Approx(base + 2.5 * 100.0).epsilon(1e-14));

  // default c on a smooth noise-free instance is L_g D_X
  params.c = -1.0;
  const auto s = make_policy("det_B", inst, params);
  CHECK(s.c == doctest::Approx(inst.L_g() * inst.D_X()).epsilon(1e-14));
}

TEST_CASE("adaptive policy follows the running multiplier maximum") {
  const auto inst = testing::qq1();
  PolicyParams params;  // c1 = c2 = 6
  const auto s = make_policy("adaptive", inst, params);
  const double L = inst.L(), Mg = inst.M_g();
  CHECK(s.beta == doctest::Approx(12.0 * Mg * Mg / (36.0 * L * L)).epsilon(1e-14));
  const auto p0 = s.params(0, 0.0, -1);
  CHECK(p0.eta == doctest::Approx(6.0 * L).epsilon(1e-15));
  CHECK(p0.gamma == 1.0);
  CHECK(p0.theta == 1.0);
  const auto p1 = s.params(1, 2.0, p0.eta);
  CHECK(p1.eta == doctest::Approx(6.0 * L + 6.0 * inst.L_g() * 2.0).epsilon(1e-15));
  CHECK(p1.gamma < 1.0);
  CHECK(p1.theta == (6.0 * L / p0.eta) / p1.gamma);  // constructional identity
  CHECK(p1.gamma * p1.eta == doctest::Approx(p0.gamma * p0.eta).epsilon(1e-15));
  CHECK(p1.gamma * p1.tau == doctest::Approx(p0.gamma * p0.tau).epsilon(1e-15));
}

TEST_CASE("corollary constants: c1 = c2 = 6, L = 1, M_g = sqrt(2)") {
  // beta = 12 * 2 / 36 = 2/3, eta_0 = 6, tau_0 = 4
  auto set = SimpleSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  auto op = OperatorSpec::affine(Matrix::Identity(2, 2), Vector::Zero(2));
  ConstraintSpec g({ConstraintTerm::affine((Vector(2) << 1, 1).finished(), -0.25)}, set);
  const ProblemInstance inst(std::move(set), std::move(op), std::move(g));
  REQUIRE(inst.L() == doctest::Approx(1.0));
  REQUIRE(inst.M_g() == doctest::Approx(std::sqrt(2.0)));
  const auto s = make_policy("adaptive", inst, {});
  CHECK(s.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto p0 = s.params(0, 0.0, -1);
  CHECK(p0.eta == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(p0.tau == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("adaptive degenerates to constant steps when L_g = 0") {
  const auto inst = testing::qc1();  // affine constraint, L_g = 0
  const auto s = make_policy("adaptive", inst, {});
  double prev_eta = -1;
  for (long t = 0; t < 50; ++t) {
    const auto p = s.params(t, 3.0 + 0.1 * double(t), prev_eta);
    CHECK(p.eta == doctest::Approx(6.0 * inst.L()).epsilon(1e-15));
    CHECK(p.gamma == 1.0);
    CHECK(p.theta == 1.0);
    prev_eta = p.eta;
  }
}

TEST_CASE("policy validation errors") {
  const auto inst = testing::qq1();
  PolicyParams params;
  params.T = 100;
  params.B = 0.5;
  CHECK_THROWS_AS(make_policy("det_B", inst, params), ConfigError);
  CHECK_THROWS_AS(make_policy("stoch_B", inst, params), ConfigError);
  params.B = 1.0;
  CHECK_THROWS_AS(make_policy("no_such_policy", inst, params), ConfigError);
  params.T = 0;
  CHECK_THROWS_AS(make_policy("det_B", inst, params), ConfigError);
  params.T = 100;
  params.mode = EtaMode::Max;
  CHECK_THROWS_AS(make_policy("stoch_B", inst, params), ConfigError);
  PolicyParams bad_adaptive;
  bad_adaptive.c1 = 6.0;
  bad_adaptive.c2 = 1.0;  // violates c1/3 >= c1/c2 + 1
  CHECK_THROWS_AS(make_policy("adaptive", inst, bad_adaptive), ConfigError);

  auto no_known = ProblemInstance(inst.set(), inst.op(), inst.constraints());
  PolicyParams p2;
  p2.T = 10;
  CHECK_THROWS_AS(make_policy("det_known_lambda", no_known, p2), ConfigError);
}
