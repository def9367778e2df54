// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/saddle.hpp"

#include <cmath>

namespace fcvi {

namespace {

void check_coupling(const std::vector<ConstraintTerm>& coupling, Eigen::Index dim_w) {
  for (const auto& t : coupling)
    if (t.dim() != dim_w)
      throw InputError("saddle: coupling constraints must act on the stacked (u,v) vector");
}

void check_psd(const Matrix& M, const char* what) {
  if (M.rows() != M.cols()) throw InputError(std::string(what) + " must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw InputError(std::string(what) + " must be PSD for a convex-concave payoff");
}

}  // namespace

SaddleProblem SaddleProblem::bilinear(SimpleSet U, SimpleSet V, Matrix K, Vector a, Vector b,
                                      std::vector<ConstraintTerm> coupling, std::string label) {
  if (K.rows() != U.dim() || K.cols() != V.dim())
    throw InputError("saddle: K must be dim(U) x dim(V)");
  require_dim(a, U.dim(), "saddle a");
  require_dim(b, V.dim(), "saddle b");
  check_coupling(coupling, U.dim() + V.dim());
  SaddleProblem sp;
  sp.payoff_ = PayoffKind::Bilinear;
  sp.U_ = std::move(U);
  sp.V_ = std::move(V);
  sp.K_ = std::move(K);
  sp.a_ = std::move(a);
  sp.b_ = std::move(b);
  sp.coupling_ = std::move(coupling);
  sp.label_ = std::move(label);
  return sp;
}

SaddleProblem SaddleProblem::quadratic(SimpleSet U, SimpleSet V, Matrix P, Matrix K, Matrix R,
                                       Vector a, Vector b, std::vector<ConstraintTerm> coupling,
                                       std::string label) {
  check_psd(P, "saddle: P");
  check_psd(R, "saddle: R");
  if (P.rows() != U.dim() || R.rows() != V.dim())
    throw InputError("saddle: P/R dimensions must match the player sets");
  SaddleProblem sp = bilinear(std::move(U), std::move(V), std::move(K), std::move(a),
                              std::move(b), std::move(coupling), std::move(label));
  sp.payoff_ = PayoffKind::Quadratic;
  sp.P_ = std::move(P);
  sp.R_ = std::move(R);
  return sp;
}

SaddleProblem SaddleProblem::custom(SimpleSet U, SimpleSet V, Callbacks cb,
                                    std::vector<ConstraintTerm> coupling, std::string label) {
  if (!cb.f || !cb.grad_u || !cb.grad_v)
    throw InputError("saddle: custom payoff needs f, grad_u and grad_v");
  check_coupling(coupling, U.dim() + V.dim());
  SaddleProblem sp;
  sp.payoff_ = PayoffKind::Custom;
  sp.U_ = std::move(U);
  sp.V_ = std::move(V);
  sp.cb_ = std::move(cb);
  sp.coupling_ = std::move(coupling);
  // Convex-concavity of a callback payoff is unchecked; flag the label.
  sp.label_ = "custom:" + label;
  return sp;
}

double SaddleProblem::payoff(const Vector& u, const Vector& v) const {
  require_dim(u, dim_u(), "payoff u");
  require_dim(v, dim_v(), "payoff v");
  switch (payoff_) {
    case PayoffKind::Bilinear:
      return u.dot(K_ * v) + a_.dot(u) + b_.dot(v);
    case PayoffKind::Quadratic:
      return 0.5 * u.dot(P_ * u) + u.dot(K_ * v) - 0.5 * v.dot(R_ * v) + a_.dot(u) + b_.dot(v);
    case PayoffKind::Custom:
      return cb_.f(u, v);
  }
  return 0.0;
}

Vector SaddleProblem::grad_u(const Vector& u, const Vector& v) const {
  switch (payoff_) {
    case PayoffKind::Bilinear:
      return K_ * v + a_;
    case PayoffKind::Quadratic:
      return P_ * u + K_ * v + a_;
    case PayoffKind::Custom:
      return cb_.grad_u(u, v);
  }
  return Vector();
}

Vector SaddleProblem::grad_v(const Vector& u, const Vector& v) const {
  switch (payoff_) {
    case PayoffKind::Bilinear:
      return K_.transpose() * u + b_;
    case PayoffKind::Quadratic:
      return K_.transpose() * u - R_ * v + b_;
    case PayoffKind::Custom:
      return cb_.grad_v(u, v);
  }
  return Vector();
}

ProblemInstance saddle_to_vi(const SaddleProblem& sp) {
  SimpleSet W = SimpleSet::product({sp.set_u(), sp.set_v()});
  const Eigen::Index nu = sp.dim_u();
  const Eigen::Index nv = sp.dim_v();
  OperatorSpec op = [&] {
    switch (sp.payoff_kind()) {
      case SaddleProblem::PayoffKind::Bilinear:
      case SaddleProblem::PayoffKind::Quadratic: {
        // F(w) = [grad_u f; -grad_v f] is affine: the coupling block is
        // skew-symmetric, the diagonal blocks (P, R) are PSD.
        Matrix M = Matrix::Zero(nu + nv, nu + nv);
        M.topRightCorner(nu, nv) = sp.K();
        M.bottomLeftCorner(nv, nu) = -sp.K().transpose();
        if (sp.payoff_kind() == SaddleProblem::PayoffKind::Quadratic) {
          M.topLeftCorner(nu, nu) = sp.P();
          M.bottomRightCorner(nv, nv) = sp.R();
        }
        Vector c(nu + nv);
        c << sp.a(), -sp.b();
        return OperatorSpec::affine(std::move(M), std::move(c));
      }
      case SaddleProblem::PayoffKind::Custom: {
        auto fn = [&sp, nu, nv](const Vector& w) {
          Vector out(nu + nv);
          out << sp.grad_u(w.head(nu), w.tail(nv)), -sp.grad_v(w.head(nu), w.tail(nv));
          return out;
        };
        // Moduli must come from the caller for custom payoffs.
        return OperatorSpec::custom(nu + nv, fn, 0.0, 0.0);
      }
    }
    throw InputError("saddle_to_vi: unknown payoff kind");
  }();
  ConstraintSpec constraints(sp.coupling(), W);
  std::optional<KnownSolution> known;
  if (sp.known_saddle()) known = *sp.known_saddle();
  return ProblemInstance(std::move(W), std::move(op), std::move(constraints), std::move(known),
                         sp.label());
}

namespace {

bool coupled_feasible(const SaddleProblem& sp, const Vector& w, double tol) {
  for (const auto& t : sp.coupling())
    if (t.value(w) > tol) return false;
  return true;
}

}  // namespace

double saddle_gap(const SaddleProblem& sp, const Vector& w_hat,
                  const std::vector<Vector>& probes) {
  require_dim(w_hat, sp.dim_u() + sp.dim_v(), "saddle_gap");
  if (probes.empty()) throw ConfigError("saddle_gap: empty probe set");
  const Vector u_hat = sp.split_u(w_hat);
  const Vector v_hat = sp.split_v(w_hat);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Vector& w = probes[i];
    if (!sp.set_u().contains(sp.split_u(w), 1e-9) || !sp.set_v().contains(sp.split_v(w), 1e-9) ||
        !coupled_feasible(sp, w, 1e-9))
      throw InputError("saddle_gap: probe " + std::to_string(i) + " is infeasible");
    best = std::max(best, sp.payoff(u_hat, sp.split_v(w)) - sp.payoff(sp.split_u(w), v_hat));
  }
  return best;
}

namespace {

// Enumerates one player's set on a grid via the bounding box.
std::vector<Vector> player_grid(const SimpleSet& set, double step) {
  if (set.dim() > 2)
    throw UnsupportedError("check_gne: grid slices support per-player dimension <= 2");
  Vector lo, hi;
  set.bounding_box(lo, hi);
  std::vector<Vector> pts;
  if (set.dim() == 1) {
    for (double x = lo[0]; x <= hi[0] + 1e-12; x += step) {
      Vector p(1);
      p << std::min(x, hi[0]);
      if (set.contains(p, 1e-9)) pts.push_back(p);
    }
    return pts;
  }
  for (double x = lo[0]; x <= hi[0] + 1e-12; x += step)
    for (double y = lo[1]; y <= hi[1] + 1e-12; y += step) {
      Vector p(2);
      p << std::min(x, hi[0]), std::min(y, hi[1]);
      if (set.contains(p, 1e-9)) pts.push_back(p);
    }
  return pts;
}

}  // namespace

GneReport check_gne(const SaddleProblem& sp, const Vector& w_hat, double tol, double grid_step) {
  require_dim(w_hat, sp.dim_u() + sp.dim_v(), "check_gne");
  const Vector u_hat = sp.split_u(w_hat);
  const Vector v_hat = sp.split_v(w_hat);
  GneReport report;
  Vector g_hat(static_cast<Eigen::Index>(sp.coupling().size()));
  for (std::size_t j = 0; j < sp.coupling().size(); ++j)
    g_hat[static_cast<Eigen::Index>(j)] = sp.coupling()[j].value(w_hat);
  report.infeasibility = g_hat.size() ? g_hat.cwiseMax(0.0).norm() : 0.0;

  const double f_hat = sp.payoff(u_hat, v_hat);
  Vector w(sp.dim_u() + sp.dim_v());

  // Player u minimizes f(., v_hat) over U ∩ {g(., v_hat) <= 0}.
  report.best_u = u_hat;
  for (const auto& u : player_grid(sp.set_u(), grid_step)) {
    w << u, v_hat;
    if (!coupled_feasible(sp, w, 1e-9)) continue;
    const double improvement = f_hat - sp.payoff(u, v_hat);
    if (improvement > report.u_improvement) {
      report.u_improvement = improvement;
      report.best_u = u;
    }
  }
  // Player v maximizes f(u_hat, .) over V ∩ {g(u_hat, .) <= 0}.
  report.best_v = v_hat;
  for (const auto& v : player_grid(sp.set_v(), grid_step)) {
    w << u_hat, v;
    if (!coupled_feasible(sp, w, 1e-9)) continue;
    const double improvement = sp.payoff(u_hat, v) - f_hat;
    if (improvement > report.v_improvement) {
      report.v_improvement = improvement;
      report.best_v = v;
    }
  }

  report.pass = report.infeasibility <= tol && report.u_improvement <= tol &&
                report.v_improvement <= tol;
  return report;
}

}  // namespace fcvi
