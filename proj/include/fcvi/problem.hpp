// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcvi/simple_set.hpp"
#include "fcvi/types.hpp"

namespace fcvi {

// Monotone operator F with a Lipschitz modulus L and a nonsmooth
// variation bound H: ||F(x1) - F(x2)|| <= L ||x1 - x2|| + H.
class OperatorSpec {
 public:
  enum class Kind { Affine, AffinePlusNonsmooth, Custom };

  // F(x) = A x + b. The symmetric part of A must be PSD (eigenvalue check
  // at tolerance 1e-9); L is the spectral norm of A.
  static OperatorSpec affine(Matrix A, Vector b);

  // F(x) = A x + b + h * sign(x) componentwise, sign(0) = 0. The sign
  // selection is a fixed bounded monotone map, so F stays monotone.
  static OperatorSpec affine_plus_nonsmooth(Matrix A, Vector b, double nonsmooth_scale);

  // Arbitrary callback; monotonicity and the (L, H) moduli are the
  // caller's responsibility.
  static OperatorSpec custom(Eigen::Index dim, std::function<Vector(const Vector&)> fn,
                             double L, double H);

  Vector eval(const Vector& x) const;

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double lipschitz() const { return L_; }
  double nonsmooth_bound() const { return H_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double nonsmooth_scale() const { return nonsmooth_scale_; }

 private:
  OperatorSpec() = default;
  Kind kind_ = Kind::Affine;
  Eigen::Index dim_ = 0;
  Matrix A_;
  Vector b_;
  double nonsmooth_scale_ = 0.0;
  std::function<Vector(const Vector&)> fn_;
  double L_ = 0.0;
  double H_ = 0.0;
};

// One convex constraint g_j(x) <= 0.
struct ConstraintTerm {
  enum class Kind { Affine, Quadratic, Norm };
  Kind kind = Kind::Affine;

  // affine:    a.x + offset
  // quadratic: x'Qx + c.x + offset     (Q PSD)
  // norm:      scale*||x - center|| + offset
  Vector a;
  Matrix Q;
  Vector c;
  double scale = 0.0;
  Vector center;
  double offset = 0.0;

  static ConstraintTerm affine(Vector a, double offset);
  static ConstraintTerm quadratic(Matrix Q, Vector c, double offset);
  static ConstraintTerm norm(double scale, Vector center, double offset);

  double value(const Vector& x) const;
  // Subgradient selection: the zero vector at the norm kink.
  Vector gradient(const Vector& x) const;

  Eigen::Index dim() const;
  double smoothness() const;     // L_{g_j}
  double nonsmoothness() const;  // H_{g_j}
};

// The stacked constraint map g: R^n -> R^m with aggregate moduli
// L_g = sqrt(sum L_{g_j}^2), H_g = sqrt(sum H_{g_j}^2), and a uniform
// Jacobian-norm bound M_g over the given set.
class ConstraintSpec {
 public:
  ConstraintSpec() = default;
  ConstraintSpec(std::vector<ConstraintTerm> terms, const SimpleSet& domain);

  Eigen::Index count() const { return static_cast<Eigen::Index>(terms_.size()); }
  Eigen::Index dim() const { return dim_; }
  const std::vector<ConstraintTerm>& terms() const { return terms_; }

  Vector values(const Vector& x) const;
  // Column j holds the (sub)gradient of g_j at x; shape n x m.
  Matrix jacobian(const Vector& x) const;

  double smoothness() const { return L_g_; }      // L_g
  double nonsmoothness() const { return H_g_; }   // H_g
  double jacobian_bound() const { return M_g_; }  // M_g
  bool jacobian_bound_estimated() const { return M_g_estimated_; }

 private:
  std::vector<ConstraintTerm> terms_;
  Eigen::Index dim_ = 0;
  double L_g_ = 0.0;
  double H_g_ = 0.0;
  double M_g_ = 0.0;
  bool M_g_estimated_ = false;
};

struct KnownSolution {
  Vector x_star;
  Vector lambda_star;
};

// An FCVI instance: find x* in X ∩ {g <= 0} with <F(x*), x - x*> >= 0 for
// all feasible x. Immutable after construction; all evaluations are pure.
class ProblemInstance {
 public:
  ProblemInstance(SimpleSet set, OperatorSpec op, ConstraintSpec constraints,
                  std::optional<KnownSolution> known = std::nullopt,
                  std::string label = "");

  const SimpleSet& set() const { return set_; }
  const OperatorSpec& op() const { return op_; }
  const ConstraintSpec& constraints() const { return constraints_; }
  const std::optional<KnownSolution>& known_solution() const { return known_; }
  const std::string& label() const { return label_; }

  Eigen::Index dim() const { return set_.dim(); }
  Eigen::Index num_constraints() const { return constraints_.count(); }

  Vector operator_value(const Vector& x) const { return op_.eval(x); }
  Vector constraint_values(const Vector& x) const { return constraints_.values(x); }
  Matrix constraint_jacobian(const Vector& x) const { return constraints_.jacobian(x); }

  double L() const { return op_.lipschitz(); }
  double H() const { return op_.nonsmooth_bound(); }
  double L_g() const { return constraints_.smoothness(); }
  double H_g() const { return constraints_.nonsmoothness(); }
  double M_g() const { return constraints_.jacobian_bound(); }
  double D_X() const { return set_.diameter(); }

 private:
  SimpleSet set_;
  OperatorSpec op_;
  ConstraintSpec constraints_;
  std::optional<KnownSolution> known_;
  std::string label_;
};

// First-order model of g at x_prev evaluated at x:
//   l_g(x) = g(x_prev) + J(x_prev)' (x - x_prev).
// By convexity l_g(x) <= g(x) componentwise.
Vector linearize_constraints(const Vector& g_prev, const Matrix& jac_prev,
                             const Vector& x_prev, const Vector& x);

// Geometry of one constraint handed to the KKT constructor; the offset is
// chosen by the constructor itself.
struct ConstraintGeometry {
  ConstraintTerm::Kind kind = ConstraintTerm::Kind::Affine;
  Vector a;          // affine direction
  Matrix Q;          // quadratic
  Vector c;
  double scale = 0;  // norm
  Vector center;
};

struct KktSpec {
  SimpleSet set = SimpleSet::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  Matrix A;  // monotone seed; b is derived
  std::vector<ConstraintGeometry> geometry;
  Vector x_star;       // strictly interior to the set
  Vector lambda_star;  // >= 0; positive entries must be marked active
  std::vector<bool> active;  // defaults to lambda_star > 0
  double inactive_margin = 0.25;
  std::string label = "kkt";
};

// Builds an instance whose KKT point is (x_star, lambda_star) exactly:
// offsets make active constraints tight and inactive ones slack, and the
// operator offset b := -A x* - J(x*) lambda* zeroes the stationarity
// residual. The result is validated against the known-solution invariants.
ProblemInstance build_kkt_instance(const KktSpec& spec);

// Residuals of the KKT system at (x, lambda); all should be <= 1e-10 on a
// constructed instance.
struct KktResiduals {
  double stationarity;      // ||F(x) + J(x) lambda||  (interior x)
  double feasibility;       // max_j [g_j(x)]_+
  double complementarity;   // max_j |lambda_j g_j(x)|
  double dual_negativity;   // max_j [-lambda_j]_+
};
KktResiduals kkt_residuals(const ProblemInstance& inst, const Vector& x, const Vector& lambda);

}  // namespace fcvi
