// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/simple_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fcvi {

SimpleSet SimpleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw InputError("box: lower/upper dimension mismatch");
  if (((upper - lower).array() < 0).any())
    throw InputError("box: requires lower <= upper componentwise");
  SimpleSet s;
  s.kind_ = Kind::Box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

SimpleSet SimpleSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw InputError("ball: empty center");
  if (!(radius > 0)) throw InputError("ball: radius must be positive");
  SimpleSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = center.size();
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

SimpleSet SimpleSet::simplex(Eigen::Index dim, double scale) {
  if (dim <= 0) throw InputError("simplex: dimension must be positive");
  if (!(scale > 0)) throw InputError("simplex: scale must be positive");
  SimpleSet s;
  s.kind_ = Kind::Simplex;
  s.dim_ = dim;
  s.scale_ = scale;
  return s;
}

SimpleSet SimpleSet::product(std::vector<SimpleSet> blocks) {
  if (blocks.empty()) throw InputError("product: needs at least one block");
  SimpleSet s;
  s.kind_ = Kind::Product;
  s.dim_ = 0;
  for (const auto& b : blocks) s.dim_ += b.dim();
  s.blocks_ = std::move(blocks);
  return s;
}

Vector project_simplex(const Vector& point, double scale) {
  const Eigen::Index n = point.size();
  std::vector<double> u(point.data(), point.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  Eigen::Index rho = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += u[static_cast<std::size_t>(i)];
    const double candidate = (cumsum - scale) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - candidate > 0) {
      theta = candidate;
      rho = i + 1;
    }
  }
  (void)rho;
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(point[i] - theta, 0.0);
  return out;
}

Vector SimpleSet::project(const Vector& point) const {
  require_dim(point, dim_, "project");
  if (!point.allFinite()) throw InputError("project: non-finite input point");
  switch (kind_) {
    case Kind::Box:
      return point.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::Ball: {
      const Vector d = point - center_;
      const double nrm = d.norm();
      if (nrm <= radius_) return point;
      return center_ + (radius_ / nrm) * d;
    }
    case Kind::Simplex:
      return project_simplex(point, scale_);
    case Kind::Product: {
      Vector out(dim_);
      Eigen::Index off = 0;
      for (const auto& b : blocks_) {
        out.segment(off, b.dim()) = b.project(point.segment(off, b.dim()));
        off += b.dim();
      }
      return out;
    }
  }
  throw InputError("project: unknown set kind");
}

bool SimpleSet::contains(const Vector& point, double tol) const {
  require_dim(point, dim_, "contains");
  switch (kind_) {
    case Kind::Box:
      return ((point - lower_).array() >= -tol).all() &&
             ((upper_ - point).array() >= -tol).all();
    case Kind::Ball:
      return (point - center_).norm() <= radius_ + tol;
    case Kind::Simplex:
      return (point.array() >= -tol).all() && std::abs(point.sum() - scale_) <= tol;
    case Kind::Product: {
      Eigen::Index off = 0;
      for (const auto& b : blocks_) {
        if (!b.contains(point.segment(off, b.dim()), tol)) return false;
        off += b.dim();
      }
      return true;
    }
  }
  return false;
}

double SimpleSet::diameter() const {
  switch (kind_) {
    case Kind::Box:
      return (upper_ - lower_).norm();
    case Kind::Ball:
      return 2.0 * radius_;
    case Kind::Simplex:
      // Farthest vertex pair is (s e_i, s e_j); a single point when n == 1.
      return dim_ >= 2 ? scale_ * std::sqrt(2.0) : 0.0;
    case Kind::Product: {
      double sq = 0.0;
      for (const auto& b : blocks_) sq += b.diameter() * b.diameter();
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

Vector SimpleSet::anchor() const {
  switch (kind_) {
    case Kind::Box:
      return 0.5 * (lower_ + upper_);
    case Kind::Ball:
      return center_;
    case Kind::Simplex:
      return Vector::Constant(dim_, scale_ / static_cast<double>(dim_));
    case Kind::Product: {
      Vector out(dim_);
      Eigen::Index off = 0;
      for (const auto& b : blocks_) {
        out.segment(off, b.dim()) = b.anchor();
        off += b.dim();
      }
      return out;
    }
  }
  return Vector();
}

void SimpleSet::bounding_box(Vector& lower, Vector& upper) const {
  switch (kind_) {
    case Kind::Box:
      lower = lower_;
      upper = upper_;
      return;
    case Kind::Ball:
      lower = center_.array() - radius_;
      upper = center_.array() + radius_;
      return;
    case Kind::Simplex:
      lower = Vector::Zero(dim_);
      upper = Vector::Constant(dim_, scale_);
      return;
    case Kind::Product: {
      lower.resize(dim_);
      upper.resize(dim_);
      Eigen::Index off = 0;
      for (const auto& b : blocks_) {
        Vector lo, hi;
        b.bounding_box(lo, hi);
        lower.segment(off, b.dim()) = lo;
        upper.segment(off, b.dim()) = hi;
        off += b.dim();
      }
      return;
    }
  }
}

std::vector<Vector> SimpleSet::extreme_points(std::size_t max_count) const {
  std::vector<Vector> pts;
  switch (kind_) {
    case Kind::Box: {
      if (dim_ > 20) return pts;
      const std::size_t count = std::size_t{1} << dim_;
      if (count > max_count) return pts;
      for (std::size_t mask = 0; mask < count; ++mask) {
        Vector v(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i)
          v[i] = (mask >> i) & 1 ? upper_[i] : lower_[i];
        pts.push_back(std::move(v));
      }
      return pts;
    }
    case Kind::Ball: {
      if (static_cast<std::size_t>(2 * dim_) > max_count) return pts;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        Vector v = center_;
        v[i] += radius_;
        pts.push_back(v);
        v[i] -= 2 * radius_;
        pts.push_back(v);
      }
      return pts;
    }
    case Kind::Simplex: {
      if (static_cast<std::size_t>(dim_) > max_count) return pts;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        Vector v = Vector::Zero(dim_);
        v[i] = scale_;
        pts.push_back(std::move(v));
      }
      return pts;
    }
    case Kind::Product: {
      std::vector<Vector> acc{Vector(0)};
      for (const auto& b : blocks_) {
        auto block_pts = b.extreme_points(max_count);
        if (block_pts.empty()) return {};
        if (acc.size() * block_pts.size() > max_count) return {};
        std::vector<Vector> next;
        next.reserve(acc.size() * block_pts.size());
        for (const auto& head : acc)
          for (const auto& tail : block_pts) {
            Vector v(head.size() + tail.size());
            v << head, tail;
            next.push_back(std::move(v));
          }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return pts;
}

}  // namespace fcvi
