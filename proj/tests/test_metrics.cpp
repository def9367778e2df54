// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "fcvi/metrics.hpp"
#include "support/instances.hpp"

using namespace fcvi;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

ProblemInstance two_affine_instance() {
  auto set = SimpleSet::box(vec2(-2, -2), vec2(2, 2));
  auto op = OperatorSpec::affine(Matrix::Identity(2, 2), Vector::Zero(2));
  ConstraintSpec g({ConstraintTerm::affine(vec2(1, 0), 0.0), ConstraintTerm::affine(vec2(0, 1), 0.0)},
                   set);
  return ProblemInstance(std::move(set), std::move(op), std::move(g));
}

}  // namespace

TEST_CASE("infeasibility is the norm of the positive part") {
  const auto inst = two_affine_instance();
  // g(x) = (x1, x2)
  CHECK(infeasibility(inst, vec2(-1.0, 0.5)) == 0.5);
  CHECK(infeasibility(inst, vec2(-0.3, -0.7)) == 0.0);
  CHECK(infeasibility(inst, vec2(1.5, 2.0)) == 2.5);
  CHECK(infeasibility(inst, vec2(3.0, 4.0)) == 5.0);
  CHECK(infeasibility(inst, vec2(3.0 / 5, 4.0 / 5)) == doctest::Approx(1.0));
}

TEST_CASE("restricted gap basics") {
  const auto inst = testing::qc1();
  const Vector xs = inst.known_solution()->x_star;
  CHECK(restricted_weak_gap(inst, xs, {xs}) == 0.0);

  const Vector probe = vec2(0.0, 0.0);
  const Vector x_bar = vec2(0.2, -0.1);
  CHECK(restricted_weak_gap(inst, x_bar, {probe}) ==
        doctest::Approx(inst.operator_value(probe).dot(x_bar - probe)).epsilon(1e-15));

  CHECK_THROWS_AS(restricted_weak_gap(inst, xs, {}), ConfigError);
  CHECK_THROWS_AS(restricted_weak_gap(inst, xs, {vec2(0.9, 0.9)}), InputError);  // g > 0
}

TEST_CASE("brute force gap on a 1-D unconstrained instance") {
  auto set = SimpleSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  auto op = OperatorSpec::affine(Matrix::Identity(1, 1), Vector::Zero(1));
  const ProblemInstance inst(std::move(set), std::move(op), ConstraintSpec{});
  // max_p p (0 - p) = 0 attained at p = 0
  CHECK(brute_force_weak_gap(inst, Vector::Zero(1), 0.125) == 0.0);
}

TEST_CASE("restricted gap over the grid equals the brute force oracle") {
  const auto inst = testing::qc1();
  const auto grid = feasible_grid(inst, 0.01);
  REQUIRE(grid.size() > 100);
  const Vector x_bar = vec2(0.0, 0.0);
  const double restricted = restricted_weak_gap(inst, x_bar, grid);
  const double brute = brute_force_weak_gap(inst, x_bar, 0.01);
  CHECK(std::abs(restricted - brute) <= 1e-12);

  // subsets can only lower the restricted gap
  std::vector<Vector> subset(grid.begin(), grid.begin() + static_cast<long>(grid.size()) / 3);
  CHECK(restricted_weak_gap(inst, x_bar, subset) <= brute + 1e-12);
}

TEST_CASE("brute force gap near the solution is at the grid resolution") {
  const auto inst = testing::qc1();
  const Vector xs = inst.known_solution()->x_star;
  const double step = 0.005;
  const double gap = brute_force_weak_gap(inst, xs, step);
  CHECK(gap >= -1e-12);  // x* lands on this grid, so the self-probe gives 0
  CHECK(gap <= inst.L() * inst.D_X() * step);
}

TEST_CASE("brute force gap is stable under grid refinement") {
  const auto inst = testing::qc1();
  const Vector x_bar = vec2(0.1, 0.1);
  const double coarse = brute_force_weak_gap(inst, x_bar, 0.02);
  const double fine = brute_force_weak_gap(inst, x_bar, 0.01);
  CHECK(std::abs(coarse - fine) <= inst.L() * inst.D_X() * 0.02);
}

TEST_CASE("brute force rejects high dimensions") {
  auto set = SimpleSet::box(Vector::Constant(4, -1.0), Vector::Constant(4, 1.0));
  auto op = OperatorSpec::affine(Matrix::Identity(4, 4), Vector::Zero(4));
  const ProblemInstance inst(std::move(set), std::move(op), ConstraintSpec{});
  CHECK_THROWS_AS(brute_force_weak_gap(inst, Vector::Zero(4), 0.1), UnsupportedError);
}

TEST_CASE("lagrangian gap at and around the saddle") {
  const auto inst = testing::qc1();
  const auto& ks = *inst.known_solution();
  CHECK(lagrangian_gap(inst, ks.x_star, ks.lambda_star) == doctest::Approx(0.0).epsilon(1e-15));

  // lambda = lambda*: reduces to <F(x*), x - x*> + <lambda*, g(x)>
  const Vector x_bar = vec2(-0.2, 0.3);
  const double expected = inst.operator_value(ks.x_star).dot(x_bar - ks.x_star) +
                          ks.lambda_star.dot(inst.constraint_values(x_bar));
  CHECK(lagrangian_gap(inst, x_bar, ks.lambda_star) == doctest::Approx(expected).epsilon(1e-14));

  // hand value at x = (0,0), lambda = 0: <F(x*), -x*> + g(0,0) = 0.5 - 0.5
  CHECK(lagrangian_gap(inst, vec2(0, 0), Vector::Zero(1)) ==
        doctest::Approx(0.0).epsilon(1e-15));

  // saddle property over random feasible points and multipliers
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const Vector x = vec2(unif(rng), unif(rng));
    const Vector lam = Vector::Constant(1, std::abs(unif(rng)) * 3);
    CHECK(lagrangian_gap(inst, x, lam) >= -1e-9);
  }

  auto no_known = ProblemInstance(inst.set(), inst.op(), inst.constraints());
  CHECK_THROWS_AS(lagrangian_gap(no_known, vec2(0, 0), Vector::Zero(1)), ConfigError);
}

TEST_CASE("rate fitting recovers exact power laws") {
  SUBCASE("slope -1") {
    std::vector<double> ts, errs;
    for (double t : {10.0, 100.0, 1000.0, 10000.0}) {
      ts.push_back(t);
      errs.push_back(10.0 / t);
    }
    const auto fit = fit_rate_points(ts, errs, ErrorChannel::Infeasibility);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fit.residual <= 1e-12);
  }
  SUBCASE("slope -1/2") {
    std::vector<double> ts, errs;
    for (double t : {10.0, 100.0, 1000.0, 10000.0, 100000.0}) {
      ts.push_back(t);
      errs.push_back(3.0 / std::sqrt(t));
    }
    const auto fit = fit_rate_points(ts, errs, ErrorChannel::GapRestricted);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("noisy power law lands within 0.05 of -1") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unif(-1, 1);
    std::vector<double> ts, errs;
    for (int k = 0; k < 8; ++k) {
      const double t = std::pow(10.0, 1.0 + 0.5 * k);
      ts.push_back(t);
      errs.push_back((1.0 + 0.1 * unif(rng)) / t);
    }
    const auto fit = fit_rate_points(ts, errs, ErrorChannel::Infeasibility);
    CHECK(std::abs(fit.slope - (-1.0)) <= 0.05);
    CHECK(fit.residual > 0.0);
  }
  SUBCASE("floor values are excluded and scarcity raises an error") {
    std::vector<double> ts{10, 100, 1000, 10000};
    std::vector<double> errs{1e-2, 1e-3, 1e-15, 1e-16};
    CHECK_THROWS_AS(fit_rate_points(ts, errs, ErrorChannel::Infeasibility), InputError);
  }
}

TEST_CASE("trace csv round-trips") {
  ConvergenceTrace trace;
  trace.records.push_back({1, 1.0, 0.5, 0.25, 0.0, 12.0, 0.0});
  trace.records.push_back({2, 2.0, 0.25, 0.125, 0.5, 12.0, 0.0});
  const std::string csv = trace.to_csv();
  CHECK(csv.rfind("t,gamma_sum,infeas,gap_restricted,lambda_norm,eta,wall_s\n", 0) == 0);
  const auto back = ConvergenceTrace::from_csv(csv);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[1].infeasibility == 0.25);
  CHECK(back.to_csv() == csv);
}

TEST_CASE("default probes are feasible and include the known solution") {
  const auto inst = testing::qc1();
  const auto probes = default_probes(inst);
  REQUIRE(!probes.empty());
  CHECK(probes.front() == inst.known_solution()->x_star);
  for (const auto& p : probes) {
    CHECK(inst.set().contains(p, 1e-9));
    CHECK(infeasibility(inst, p) <= 1e-9);
  }
  // three box vertices satisfy x1 + x2 <= 0.5, all must appear
  int vertices = 0;
  for (const auto& p : probes)
    if ((p.cwiseAbs().array() == 1.0).all()) ++vertices;
  CHECK(vertices == 3);
}
