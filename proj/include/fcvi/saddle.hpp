// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcvi/problem.hpp"

namespace fcvi {

// Convex-concave saddle point problem with a coupling constraint:
//   min_{u in U} max_{v in V} f(u,v)  s.t.  g(u,v) <= 0,
// where g is jointly convex in w = (u,v).
//
// Built-in payoffs:
//   bilinear   f(u,v) = u'Kv + a'u + b'v
//   quadratic  f(u,v) = 1/2 u'Pu + u'Kv - 1/2 v'Rv + a'u + b'v   (P, R PSD)
// Custom callbacks are accepted; convex-concavity is then the caller's
// responsibility and the label is flagged accordingly.
class SaddleProblem {
 public:
  enum class PayoffKind { Bilinear, Quadratic, Custom };

  static SaddleProblem bilinear(SimpleSet U, SimpleSet V, Matrix K, Vector a, Vector b,
                                std::vector<ConstraintTerm> coupling,
                                std::string label = "saddle");
  static SaddleProblem quadratic(SimpleSet U, SimpleSet V, Matrix P, Matrix K, Matrix R,
                                 Vector a, Vector b, std::vector<ConstraintTerm> coupling,
                                 std::string label = "saddle");
  struct Callbacks {
    std::function<double(const Vector&, const Vector&)> f;
    std::function<Vector(const Vector&, const Vector&)> grad_u;
    std::function<Vector(const Vector&, const Vector&)> grad_v;
    double L = 0.0;
    double H = 0.0;
  };
  static SaddleProblem custom(SimpleSet U, SimpleSet V, Callbacks cb,
                              std::vector<ConstraintTerm> coupling,
                              std::string label = "saddle");

  Eigen::Index dim_u() const { return U_.dim(); }
  Eigen::Index dim_v() const { return V_.dim(); }
  const SimpleSet& set_u() const { return U_; }
  const SimpleSet& set_v() const { return V_; }
  PayoffKind payoff_kind() const { return payoff_; }
  const Matrix& K() const { return K_; }
  const Matrix& P() const { return P_; }
  const Matrix& R() const { return R_; }
  const Vector& a() const { return a_; }
  const Vector& b() const { return b_; }
  const std::vector<ConstraintTerm>& coupling() const { return coupling_; }
  const std::string& label() const { return label_; }

  const std::optional<KnownSolution>& known_saddle() const { return known_; }
  void set_known_saddle(KnownSolution known) { known_ = std::move(known); }

  double payoff(const Vector& u, const Vector& v) const;
  Vector grad_u(const Vector& u, const Vector& v) const;
  Vector grad_v(const Vector& u, const Vector& v) const;

  Vector split_u(const Vector& w) const { return w.head(dim_u()); }
  Vector split_v(const Vector& w) const { return w.tail(dim_v()); }

 private:
  SaddleProblem() = default;
  PayoffKind payoff_ = PayoffKind::Bilinear;
  SimpleSet U_ = SimpleSet::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  SimpleSet V_ = U_;
  Matrix K_, P_, R_;
  Vector a_, b_;
  Callbacks cb_;
  std::vector<ConstraintTerm> coupling_;
  std::optional<KnownSolution> known_;
  std::string label_;
};

// Reduction of the saddle problem to an FCVI instance over W = U x V with
// the stacked operator F(w) = [grad_u f; -grad_v f]. For bilinear payoffs
// the coupling block of the affine operator is skew-symmetric, so the
// operator is monotone with L = ||[[P,K],[-K',R]]||.
ProblemInstance saddle_to_vi(const SaddleProblem& sp);

// Restricted saddle gap: max over feasible probes (u,v) of
// f(u_hat, v) - f(u, v_hat). Probes must lie in W and satisfy g <= 1e-9.
double saddle_gap(const SaddleProblem& sp, const Vector& w_hat,
                  const std::vector<Vector>& probes);

struct GneReport {
  bool pass = false;
  double infeasibility = 0.0;     // ||[g(w_hat)]_+||
  double u_improvement = 0.0;     // best payoff decrease available to u
  double v_improvement = 0.0;     // best payoff increase available to v
  Vector best_u;                  // the deviation achieving u_improvement
  Vector best_v;
};

// Grid certification of the generalized Nash property: with the opponent
// frozen at w_hat, neither player can improve by more than tol inside
// their own constrained slice. Desk-scale only (per-player dim <= 2).
GneReport check_gne(const SaddleProblem& sp, const Vector& w_hat, double tol,
                    double grid_step = 1e-3);

}  // namespace fcvi
