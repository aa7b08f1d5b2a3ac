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
#include "objfusion/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace objfusion {
namespace {

// Area from the same corner arithmetic as the intersection, so a box
// intersected with itself reproduces its area bit for bit.
double span_area(const Aabb& a) {
  return (a.max_x() - a.min_x()) * (a.max_y() - a.min_y());
}

}  // namespace

double wrap_angle(double psi) {
  if (!std::isfinite(psi)) {
    throw std::domain_error("wrap_angle: non-finite angle");
  }
  // remainder() lands in [-pi, pi]; fold the closed lower end onto +pi.
  double r = std::remainder(psi, kTwoPi);
  if (r <= -kPi) {
    r += kTwoPi;
  }
  if (r > kPi) {
    r = kPi;
  }
  return r;
}

Aabb::Aabb(double cx, double cy, double l, double w)
    : cx_(cx), cy_(cy), l_(l), w_(w) {
  if (!(l > 0.0) || !(w > 0.0) || !std::isfinite(cx) || !std::isfinite(cy) ||
      !std::isfinite(l) || !std::isfinite(w)) {
    throw std::invalid_argument("Aabb: extents must be positive and finite");
  }
}

double intersection_area(const Aabb& a, const Aabb& b) {
  const double ix =
      std::min(a.max_x(), b.max_x()) - std::max(a.min_x(), b.min_x());
  const double iy =
      std::min(a.max_y(), b.max_y()) - std::max(a.min_y(), b.min_y());
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  return ix * iy;
}

bool overlaps(const Aabb& a, const Aabb& b) {
  return intersection_area(a, b) > 0.0;
}

double aabb_iou(const Aabb& a, const Aabb& b) {
  const double inter = intersection_area(a, b);
  const double uni = span_area(a) + span_area(b) - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double giou_loss(const Aabb& a, const Aabb& b) {
  const double inter = intersection_area(a, b);
  const double uni = span_area(a) + span_area(b) - inter;
  if (!(uni > 0.0)) return 1.0;
  const double hull = (std::max(a.max_x(), b.max_x()) -
                       std::min(a.min_x(), b.min_x())) *
                      (std::max(a.max_y(), b.max_y()) -
                       std::min(a.min_y(), b.min_y()));
  const double giou = inter / uni - (hull - uni) / hull;
  return std::clamp(1.0 - giou, 0.0, 2.0);
}

Aabb inflate_box(const Aabb& box, const DiagCovariance& cov, double kappa) {
  if (!(kappa >= 0.0)) {
    throw std::invalid_argument("inflate_box: kappa must be non-negative");
  }
  const double sx = std::sqrt(std::max(cov[kX], 0.0));
  const double sy = std::sqrt(std::max(cov[kY], 0.0));
  return Aabb(box.cx(), box.cy(), box.l() + 2.0 * kappa * sx,
              box.w() + 2.0 * kappa * sy);
}

}  // namespace objfusion
