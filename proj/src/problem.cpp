// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/problem.hpp"

#include <cmath>
#include <random>

namespace fcvi {

namespace {

constexpr double kPsdTol = 1e-9;

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

bool symmetric_part_psd(const Matrix& A, double tol) {
  const Matrix S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

OperatorSpec OperatorSpec::affine(Matrix A, Vector b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw InputError("operator: A must be square and match b");
  if (!symmetric_part_psd(A, kPsdTol))
    throw InputError("operator: symmetric part of A is not PSD, operator would not be monotone");
  OperatorSpec op;
  op.kind_ = Kind::Affine;
  op.dim_ = b.size();
  op.L_ = spectral_norm(A);
  op.A_ = std::move(A);
  op.b_ = std::move(b);
  return op;
}

OperatorSpec OperatorSpec::affine_plus_nonsmooth(Matrix A, Vector b, double nonsmooth_scale) {
  if (nonsmooth_scale < 0) throw InputError("operator: nonsmooth scale must be >= 0");
  OperatorSpec op = affine(std::move(A), std::move(b));
  op.kind_ = Kind::AffinePlusNonsmooth;
  op.nonsmooth_scale_ = nonsmooth_scale;
  // sign(.) varies by at most 2 per component.
  op.H_ = 2.0 * nonsmooth_scale * std::sqrt(static_cast<double>(op.dim_));
  return op;
}

OperatorSpec OperatorSpec::custom(Eigen::Index dim, std::function<Vector(const Vector&)> fn,
                                  double L, double H) {
  if (dim <= 0 || !fn) throw InputError("operator: custom needs a callback and dimension");
  if (L < 0 || H < 0) throw InputError("operator: moduli must be >= 0");
  OperatorSpec op;
  op.kind_ = Kind::Custom;
  op.dim_ = dim;
  op.fn_ = std::move(fn);
  op.L_ = L;
  op.H_ = H;
  return op;
}

Vector OperatorSpec::eval(const Vector& x) const {
  require_dim(x, dim_, "eval_operator");
  switch (kind_) {
    case Kind::Affine:
      return A_ * x + b_;
    case Kind::AffinePlusNonsmooth: {
      Vector out = A_ * x + b_;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        if (x[i] > 0)
          out[i] += nonsmooth_scale_;
        else if (x[i] < 0)
          out[i] -= nonsmooth_scale_;
      }
      return out;
    }
    case Kind::Custom: {
      Vector out = fn_(x);
      require_dim(out, dim_, "eval_operator (custom output)");
      return out;
    }
  }
  throw InputError("eval_operator: unknown kind");
}

ConstraintTerm ConstraintTerm::affine(Vector a, double offset) {
  ConstraintTerm t;
  t.kind = Kind::Affine;
  t.a = std::move(a);
  t.offset = offset;
  return t;
}

ConstraintTerm ConstraintTerm::quadratic(Matrix Q, Vector c, double offset) {
  if (Q.rows() != Q.cols() || Q.rows() != c.size())
    throw InputError("constraint: Q must be square and match c");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw InputError("constraint: Q is not PSD, g_j would not be convex");
  ConstraintTerm t;
  t.kind = Kind::Quadratic;
  t.Q = std::move(Q);
  t.c = std::move(c);
  t.offset = offset;
  return t;
}

ConstraintTerm ConstraintTerm::norm(double scale, Vector center, double offset) {
  if (scale < 0) throw InputError("constraint: norm scale must be >= 0");
  ConstraintTerm t;
  t.kind = Kind::Norm;
  t.scale = scale;
  t.center = std::move(center);
  t.offset = offset;
  return t;
}

Eigen::Index ConstraintTerm::dim() const {
  switch (kind) {
    case Kind::Affine:
      return a.size();
    case Kind::Quadratic:
      return c.size();
    case Kind::Norm:
      return center.size();
  }
  return 0;
}

double ConstraintTerm::value(const Vector& x) const {
  switch (kind) {
    case Kind::Affine:
      return a.dot(x) + offset;
    case Kind::Quadratic:
      return x.dot(Q * x) + c.dot(x) + offset;
    case Kind::Norm:
      return scale * (x - center).norm() + offset;
  }
  return 0.0;
}

Vector ConstraintTerm::gradient(const Vector& x) const {
  switch (kind) {
    case Kind::Affine:
      return a;
    case Kind::Quadratic:
      return 2.0 * (Q * x) + c;
    case Kind::Norm: {
      const Vector d = x - center;
      const double nrm = d.norm();
      if (nrm == 0.0) return Vector::Zero(x.size());
      return (scale / nrm) * d;
    }
  }
  return Vector();
}

double ConstraintTerm::smoothness() const {
  return kind == Kind::Quadratic ? 2.0 * spectral_norm(Q) : 0.0;
}

double ConstraintTerm::nonsmoothness() const {
  return kind == Kind::Norm ? 2.0 * scale : 0.0;
}

namespace {

// sup_{x in domain} ||grad g_j(x)||; exact where a closed form or vertex
// enumeration is available, otherwise 1.05x a seeded sample maximum.
double gradient_sup(const ConstraintTerm& t, const SimpleSet& domain, bool& estimated) {
  switch (t.kind) {
    case ConstraintTerm::Kind::Affine:
      return t.a.norm();
    case ConstraintTerm::Kind::Norm:
      return t.scale;
    case ConstraintTerm::Kind::Quadratic: {
      if (domain.kind() == SimpleSet::Kind::Ball) {
        // ||2Qx + c|| <= ||2Q z + c|| + 2||Q|| r on the ball around z.
        return (2.0 * (t.Q * domain.center()) + t.c).norm() +
               2.0 * spectral_norm(t.Q) * domain.radius();
      }
      // ||2Qx + c||^2 is convex, so its maximum over a polytope sits at a
      // vertex.
      auto vertices = domain.extreme_points(4096);
      if (!vertices.empty()) {
        double best = 0.0;
        for (const auto& v : vertices) best = std::max(best, t.gradient(v).norm());
        return best;
      }
      break;
    }
  }
  // Fallback: sampled upper bound with a recorded inflation factor.
  estimated = true;
  Vector lo, hi;
  domain.bounding_box(lo, hi);
  std::mt19937_64 rng(0x4d67u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = 0.0;
  for (int k = 0; k < 10000; ++k) {
    Vector p(domain.dim());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    p = domain.project(p);
    best = std::max(best, t.gradient(p).norm());
  }
  return 1.05 * best;
}

}  // namespace

ConstraintSpec::ConstraintSpec(std::vector<ConstraintTerm> terms, const SimpleSet& domain)
    : terms_(std::move(terms)), dim_(domain.dim()) {
  double lg_sq = 0.0, hg_sq = 0.0, mg_sq = 0.0;
  for (const auto& t : terms_) {
    if (t.dim() != dim_) throw InputError("constraints: term dimension mismatch");
    lg_sq += t.smoothness() * t.smoothness();
    hg_sq += t.nonsmoothness() * t.nonsmoothness();
    bool estimated = false;
    const double sup = gradient_sup(t, domain, estimated);
    M_g_estimated_ = M_g_estimated_ || estimated;
    mg_sq += sup * sup;
  }
  L_g_ = std::sqrt(lg_sq);
  H_g_ = std::sqrt(hg_sq);
  M_g_ = std::sqrt(mg_sq);
  if (!terms_.empty() && !(M_g_ > 0))
    throw InputError("constraints: Jacobian bound M_g must be positive");
}

Vector ConstraintSpec::values(const Vector& x) const {
  require_dim(x, dim_, "eval_constraints");
  Vector out(count());
  for (Eigen::Index j = 0; j < count(); ++j)
    out[j] = terms_[static_cast<std::size_t>(j)].value(x);
  return out;
}

Matrix ConstraintSpec::jacobian(const Vector& x) const {
  require_dim(x, dim_, "eval_constraint_jacobian");
  Matrix out(dim_, count());
  for (Eigen::Index j = 0; j < count(); ++j)
    out.col(j) = terms_[static_cast<std::size_t>(j)].gradient(x);
  return out;
}

namespace {

void validate_known_solution(const SimpleSet& set, const OperatorSpec& op,
                             const ConstraintSpec& g, const KnownSolution& known) {
  constexpr double tol = 1e-10;
  require_dim(known.x_star, set.dim(), "known_solution x*");
  require_dim(known.lambda_star, g.count(), "known_solution lambda*");
  if (!set.contains(known.x_star, 1e-12))
    throw InputError("known_solution: x* is not in the simple set");
  if ((known.lambda_star.array() < 0).any())
    throw InputError("known_solution: lambda* must be nonnegative");
  const Vector gv = g.values(known.x_star);
  if ((gv.array() > tol).any())
    throw InputError("known_solution: x* violates g(x*) <= 0");
  for (Eigen::Index j = 0; j < g.count(); ++j)
    if (std::abs(known.lambda_star[j] * gv[j]) > tol)
      throw InputError("known_solution: complementary slackness fails at constraint " +
                       std::to_string(j));
  // Stationarity is only a plain residual when x* carries no normal-cone
  // term, which the constructor guarantees by requiring interiority.
  bool interior = true;
  if (set.kind() == SimpleSet::Kind::Box) {
    interior = ((known.x_star - set.lower()).array() > 1e-12).all() &&
               ((set.upper() - known.x_star).array() > 1e-12).all();
  } else if (set.kind() == SimpleSet::Kind::Ball) {
    interior = (known.x_star - set.center()).norm() < set.radius() - 1e-12;
  } else if (set.kind() == SimpleSet::Kind::Simplex) {
    interior = false;  // the simplex has empty interior in R^n
  } else {
    interior = false;  // conservative for products; checked by constructor paths
  }
  if (interior) {
    const double stat =
        (op.eval(known.x_star) + g.jacobian(known.x_star) * known.lambda_star).norm();
    if (stat > tol)
      throw InputError("known_solution: stationarity residual " + std::to_string(stat) +
                       " exceeds 1e-10");
  }
}

}  // namespace

ProblemInstance::ProblemInstance(SimpleSet set, OperatorSpec op, ConstraintSpec constraints,
                                 std::optional<KnownSolution> known, std::string label)
    : set_(std::move(set)),
      op_(std::move(op)),
      constraints_(std::move(constraints)),
      known_(std::move(known)),
      label_(std::move(label)) {
  if (op_.dim() != set_.dim()) throw InputError("instance: operator dimension mismatch");
  if (constraints_.count() == 0)
    constraints_ = ConstraintSpec({}, set_);  // m = 0 still evaluates at set dimension
  else if (constraints_.dim() != set_.dim())
    throw InputError("instance: constraint dimension mismatch");
  if (known_) validate_known_solution(set_, op_, constraints_, *known_);
}

Vector linearize_constraints(const Vector& g_prev, const Matrix& jac_prev,
                             const Vector& x_prev, const Vector& x) {
  if (jac_prev.rows() != x_prev.size() || jac_prev.cols() != g_prev.size())
    throw InputError("linearize_constraints: shape mismatch");
  require_dim(x, x_prev.size(), "linearize_constraints");
  return g_prev + jac_prev.transpose() * (x - x_prev);
}

namespace {

bool strictly_interior(const SimpleSet& set, const Vector& x) {
  constexpr double margin = 1e-9;
  switch (set.kind()) {
    case SimpleSet::Kind::Box:
      return ((x - set.lower()).array() > margin).all() &&
             ((set.upper() - x).array() > margin).all();
    case SimpleSet::Kind::Ball:
      return (x - set.center()).norm() < set.radius() - margin;
    case SimpleSet::Kind::Simplex:
      return false;
    case SimpleSet::Kind::Product: {
      Eigen::Index off = 0;
      for (const auto& b : set.blocks()) {
        if (!strictly_interior(b, x.segment(off, b.dim()))) return false;
        off += b.dim();
      }
      return true;
    }
  }
  return false;
}

}  // namespace

ProblemInstance build_kkt_instance(const KktSpec& spec) {
  const Eigen::Index n = spec.set.dim();
  require_dim(spec.x_star, n, "build_kkt_instance x*");
  if (spec.A.rows() != n || spec.A.cols() != n)
    throw InputError("build_kkt_instance: A must be n x n");
  const Eigen::Index m = static_cast<Eigen::Index>(spec.geometry.size());
  require_dim(spec.lambda_star, m, "build_kkt_instance lambda*");
  if ((spec.lambda_star.array() < 0).any())
    throw InputError("build_kkt_instance: lambda* must be nonnegative");
  if (!strictly_interior(spec.set, spec.x_star))
    throw InputError("build_kkt_instance: x* must be strictly interior to the set "
                     "(a boundary point would carry a normal-cone term)");
  std::vector<bool> active = spec.active;
  if (active.empty()) {
    active.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) active[static_cast<std::size_t>(j)] = spec.lambda_star[j] > 0;
  }
  if (static_cast<Eigen::Index>(active.size()) != m)
    throw InputError("build_kkt_instance: active mask size mismatch");
  for (Eigen::Index j = 0; j < m; ++j)
    if (spec.lambda_star[j] > 0 && !active[static_cast<std::size_t>(j)])
      throw InputError("build_kkt_instance: lambda*_j > 0 requires constraint " +
                       std::to_string(j) + " to be active");
  if (!(spec.inactive_margin > 0))
    throw InputError("build_kkt_instance: inactive margin must be positive");

  std::vector<ConstraintTerm> terms;
  terms.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& geo = spec.geometry[static_cast<std::size_t>(j)];
    ConstraintTerm t;
    switch (geo.kind) {
      case ConstraintTerm::Kind::Affine:
        t = ConstraintTerm::affine(geo.a, 0.0);
        break;
      case ConstraintTerm::Kind::Quadratic:
        t = ConstraintTerm::quadratic(geo.Q, geo.c, 0.0);
        break;
      case ConstraintTerm::Kind::Norm:
        t = ConstraintTerm::norm(geo.scale, geo.center, 0.0);
        if (active[static_cast<std::size_t>(j)] &&
            (spec.x_star - geo.center).norm() < 1e-12)
          throw InputError("build_kkt_instance: active norm constraint centered at x* "
                           "has no usable subgradient");
        break;
    }
    if (t.dim() != n) throw InputError("build_kkt_instance: constraint geometry dimension");
    const double base = t.value(spec.x_star);
    t.offset = active[static_cast<std::size_t>(j)] ? -base : -base - spec.inactive_margin;
    terms.push_back(std::move(t));
  }

  ConstraintSpec constraints(std::move(terms), spec.set);
  const Vector b = -(spec.A * spec.x_star) -
                   constraints.jacobian(spec.x_star) * spec.lambda_star;
  OperatorSpec op = OperatorSpec::affine(spec.A, b);
  KnownSolution known{spec.x_star, spec.lambda_star};
  return ProblemInstance(spec.set, std::move(op), std::move(constraints), known, spec.label);
}

KktResiduals kkt_residuals(const ProblemInstance& inst, const Vector& x, const Vector& lambda) {
  KktResiduals r{};
  r.stationarity =
      (inst.operator_value(x) + inst.constraint_jacobian(x) * lambda).norm();
  const Vector gv = inst.constraint_values(x);
  r.feasibility = gv.size() ? gv.cwiseMax(0.0).maxCoeff() : 0.0;
  r.complementarity = gv.size() ? (lambda.array() * gv.array()).abs().maxCoeff() : 0.0;
  r.dual_negativity = lambda.size() ? (-lambda).cwiseMax(0.0).maxCoeff() : 0.0;
  return r;
}

}  // namespace fcvi
