// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/metrics.hpp"

#include <cmath>
#include <random>

namespace fcvi {

namespace {

constexpr double kProbeFeasTol = 1e-9;

bool probe_feasible(const ProblemInstance& inst, const Vector& p) {
  if (!inst.set().contains(p, 1e-9)) return false;
  const Vector g = inst.constraint_values(p);
  return g.size() == 0 || (g.array() <= kProbeFeasTol).all();
}

}  // namespace

double infeasibility(const ProblemInstance& inst, const Vector& x) {
  require_dim(x, inst.dim(), "infeasibility");
  const Vector g = inst.constraint_values(x);
  return g.size() ? g.cwiseMax(0.0).norm() : 0.0;
}

double restricted_weak_gap(const ProblemInstance& inst, const Vector& x_bar,
                           const std::vector<Vector>& probes) {
  require_dim(x_bar, inst.dim(), "restricted_weak_gap");
  if (probes.empty()) throw ConfigError("restricted_weak_gap: empty probe set");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Vector& p = probes[i];
    if (!probe_feasible(inst, p)) {
      std::string desc = "(";
      for (Eigen::Index k = 0; k < p.size(); ++k)
        desc += (k ? "," : "") + std::to_string(p[k]);
      desc += ")";
      throw InputError("restricted_weak_gap: probe " + std::to_string(i) + " = " + desc +
                       " is infeasible");
    }
    best = std::max(best, inst.operator_value(p).dot(x_bar - p));
  }
  return best;
}

std::vector<Vector> feasible_grid(const ProblemInstance& inst, double grid_step) {
  if (inst.dim() > 3)
    throw UnsupportedError("feasible_grid: grid oracles support n <= 3, got n = " +
                           std::to_string(inst.dim()));
  if (!(grid_step > 0)) throw InputError("feasible_grid: grid_step must be positive");
  const SimpleSet& set = inst.set();
  Vector lo, hi;
  set.bounding_box(lo, hi);
  const Eigen::Index n = inst.dim();
  std::vector<long> counts(static_cast<std::size_t>(n));
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] =
        static_cast<long>(std::floor((hi[i] - lo[i]) / grid_step + 1e-12)) + 1;
    total *= counts[static_cast<std::size_t>(i)];
    if (total > 50'000'000)
      throw UnsupportedError("feasible_grid: grid too fine for this bounding box");
  }
  std::vector<Vector> out;
  Vector p(n);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      const long k = rem % counts[static_cast<std::size_t>(i)];
      rem /= counts[static_cast<std::size_t>(i)];
      p[i] = lo[i] + static_cast<double>(k) * grid_step;
    }
    // For simplex sets the bounding-box grid misses the measure-zero
    // simplex itself; pin the last coordinate instead.
    if (set.kind() == SimpleSet::Kind::Simplex) {
      double head = 0;
      for (Eigen::Index i = 0; i + 1 < n; ++i) head += p[i];
      if (head > set.scale() + 1e-12) continue;
      p[n - 1] = set.scale() - head;
    }
    if (probe_feasible(inst, p)) out.push_back(p);
  }
  return out;
}

double brute_force_weak_gap(const ProblemInstance& inst, const Vector& x_bar, double grid_step) {
  require_dim(x_bar, inst.dim(), "brute_force_weak_gap");
  const auto grid = feasible_grid(inst, grid_step);
  if (grid.empty())
    throw UnsupportedError("brute_force_weak_gap: no feasible grid point at this step");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : grid) best = std::max(best, inst.operator_value(p).dot(x_bar - p));
  return best;
}

double lagrangian_gap(const ProblemInstance& inst, const Vector& x_bar,
                      const Vector& lambda_bar) {
  if (!inst.known_solution())
    throw ConfigError("lagrangian_gap: instance has no known solution");
  const auto& ks = *inst.known_solution();
  require_dim(x_bar, inst.dim(), "lagrangian_gap x");
  require_dim(lambda_bar, inst.num_constraints(), "lagrangian_gap lambda");
  const Vector Fstar = inst.operator_value(ks.x_star);
  const double term_x = Fstar.dot(x_bar - ks.x_star);
  const double term_g = inst.num_constraints()
                            ? ks.lambda_star.dot(inst.constraint_values(x_bar)) -
                                  lambda_bar.dot(inst.constraint_values(ks.x_star))
                            : 0.0;
  return term_x + term_g;
}

std::vector<Vector> default_probes(const ProblemInstance& inst, const ProbeOptions& opts) {
  std::vector<Vector> probes;
  if (inst.known_solution()) probes.push_back(inst.known_solution()->x_star);
  for (const auto& v : inst.set().extreme_points())
    if (probe_feasible(inst, v)) probes.push_back(v);

  Vector lo, hi;
  inst.set().bounding_box(lo, hi);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int found = 0;
  for (std::size_t attempt = 0; attempt < opts.max_attempts && found < opts.n_random; ++attempt) {
    Vector p(inst.dim());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    p = inst.set().project(p);
    if (!probe_feasible(inst, p)) continue;
    probes.push_back(std::move(p));
    ++found;
  }
  if (probes.empty())
    throw ConfigError("default_probes: found no feasible probe; the feasible set may be "
                      "empty or vanishingly small");
  return probes;
}

std::function<std::pair<double, double>(const Vector&)> make_criteria(
    const ProblemInstance& inst, std::vector<Vector> probes) {
  return [&inst, probes = std::move(probes)](const Vector& x_bar) {
    return std::make_pair(infeasibility(inst, x_bar), restricted_weak_gap(inst, x_bar, probes));
  };
}

std::function<std::pair<double, double>(const Vector&)> make_default_criteria(
    const ProblemInstance& inst) {
  return make_criteria(inst, default_probes(inst));
}

}  // namespace fcvi
