/******************************************************************************
 * Copyright 2026 The objfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#pragma once

#include "objfusion/types.hpp"

namespace objfusion {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Maps any finite angle to (-pi, pi]. Throws std::domain_error otherwise.
double wrap_angle(double psi);

/// Axis-aligned box in the ego frame. Orientation is ignored on purpose: all
/// overlap and loss computations use (x, y, l, w) directly.
class Aabb {
 public:
  /// Throws std::invalid_argument unless l > 0 and w > 0.
  Aabb(double cx, double cy, double l, double w);

  static Aabb from(const ObjectState& o) { return Aabb(o.x, o.y, o.l, o.w); }

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double l() const { return l_; }
  double w() const { return w_; }
  double area() const { return l_ * w_; }
  double min_x() const { return cx_ - 0.5 * l_; }
  double max_x() const { return cx_ + 0.5 * l_; }
  double min_y() const { return cy_ - 0.5 * w_; }
  double max_y() const { return cy_ + 0.5 * w_; }

 private:
  double cx_;
  double cy_;
  double l_;
  double w_;
};

double intersection_area(const Aabb& a, const Aabb& b);

/// Strictly positive overlap area.
bool overlaps(const Aabb& a, const Aabb& b);

double aabb_iou(const Aabb& a, const Aabb& b);

/// 1 - gIoU with the smallest enclosing axis-aligned box as hull. In [0, 2].
double giou_loss(const Aabb& a, const Aabb& b);

/// Grows each side by kappa standard deviations of the x / y position
/// variance: l' = l + 2 kappa sigma_x, w' = w + 2 kappa sigma_y.
Aabb inflate_box(const Aabb& box, const DiagCovariance& cov, double kappa);

}  // namespace objfusion
