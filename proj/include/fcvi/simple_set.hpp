// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fcvi/types.hpp"

namespace fcvi {

// A compact convex set with a closed-form Euclidean projection.
//
// Three primitive kinds (box, ball, scaled probability simplex) plus a
// product kind used when stacking two sets into one block vector, as the
// saddle-point reduction does. Diameter is available in closed form for
// every kind.
class SimpleSet {
 public:
  enum class Kind { Box, Ball, Simplex, Product };

  static SimpleSet box(Vector lower, Vector upper);
  static SimpleSet ball(Vector center, double radius);
  static SimpleSet simplex(Eigen::Index dim, double scale);
  static SimpleSet product(std::vector<SimpleSet> blocks);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }

  Vector project(const Vector& point) const;
  bool contains(const Vector& point, double tol = 1e-12) const;
  double diameter() const;

  // A deterministic interior-ish point (box midpoint, ball center,
  // simplex barycenter), used as the default solver start.
  Vector anchor() const;

  // Axis-aligned bounding box, used by samplers and grid oracles.
  void bounding_box(Vector& lower, Vector& upper) const;

  // Vertices for box/simplex, axis extreme points for balls; empty when the
  // count would exceed max_count. Product sets combine block extremes.
  std::vector<Vector> extreme_points(std::size_t max_count = 4096) const;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }
  const std::vector<SimpleSet>& blocks() const { return blocks_; }

 private:
  SimpleSet() = default;

  Kind kind_ = Kind::Box;
  Eigen::Index dim_ = 0;
  Vector lower_, upper_;   // box
  Vector center_;          // ball
  double radius_ = 0.0;    // ball
  double scale_ = 0.0;     // simplex
  std::vector<SimpleSet> blocks_;  // product
};

// Euclidean projection onto {x >= 0, sum(x) = scale} by the sort-and-shift
// threshold method.
Vector project_simplex(const Vector& point, double scale);

}  // namespace fcvi
