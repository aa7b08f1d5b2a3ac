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
#include "objfusion/hilo_losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "objfusion/assignment.hpp"
#include "objfusion/geometry.hpp"

namespace objfusion {
namespace {

Aabb estimate_box(const FusedEstimate& e) {
  return Aabb(e.box[0], e.box[1], std::max(e.box[2], 1e-6),
              std::max(e.box[3], 1e-6));
}

double box_l1(const ObjectState& g, const FusedEstimate& e) {
  return std::fabs(g.x - e.box[0]) + std::fabs(g.y - e.box[1]) +
         std::fabs(g.l - e.box[2]) + std::fabs(g.w - e.box[3]);
}

double cross_entropy(const std::vector<double>& logits, int target) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return std::log(z) + mx - logits.at(static_cast<std::size_t>(target));
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {match_cls, match_box, match_giou, fusion_cls, fusion_box,
                   fusion_giou, fusion_orient, no_object_weight}) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("LossWeights: weights must be non-negative");
    }
  }
  if (class_weights.size() != static_cast<std::size_t>(kNumClasses)) {
    throw std::invalid_argument("LossWeights: one class weight per class");
  }
  for (double v : class_weights) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("LossWeights: class weights must be non-negative");
    }
  }
}

double matching_cost(const ObjectState& annotation, const FusedEstimate& est,
                     const LossWeights& lw) {
  if (annotation.cls == ObjectClass::kNoObject) {
    throw std::invalid_argument("matching_cost: annotation cannot be NoObject");
  }
  const double logit = est.logits.at(static_cast<std::size_t>(annotation.cls));
  return -lw.match_cls * logit + lw.match_box * box_l1(annotation, est) +
         lw.match_giou * giou_loss(Aabb::from(annotation), estimate_box(est));
}

SlotMatch hungarian_match_sample(const std::vector<ObjectState>& annotations,
                                 const std::vector<FusedEstimate>& estimates,
                                 const LossWeights& lw) {
  const auto g = static_cast<Eigen::Index>(annotations.size());
  const auto n = static_cast<Eigen::Index>(estimates.size());
  if (g > n) {
    throw std::invalid_argument("hungarian_match_sample: more annotations than slots");
  }
  SlotMatch out;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  if (g > 0) {
    CostMatrix cost(g, n);
    for (Eigen::Index r = 0; r < g; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        cost(r, c) = matching_cost(annotations[r], estimates[c], lw);
      }
    }
    // Costs may be negative (logit term); shift so every entry is
    // admissible without changing the optimum.
    const double shift = std::min(0.0, cost.minCoeff());
    const Assignment a = hungarian_assign(cost.array() - shift);
    for (Eigen::Index r = 0; r < g; ++r) {
      const int col = a.col[static_cast<std::size_t>(r)];
      out.pairs.emplace_back(static_cast<int>(r), col);
      used[static_cast<std::size_t>(col)] = 1;
      out.total_cost += cost(r, col);
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    if (!used[static_cast<std::size_t>(c)]) out.unmatched.push_back(static_cast<int>(c));
  }
  return out;
}

LossBreakdown pair_loss(const ObjectState& annotation, const FusedEstimate& est,
                        const LossWeights& lw) {
  LossBreakdown l;
  const int c = static_cast<int>(annotation.cls);
  l.cls = lw.fusion_cls * lw.class_weights.at(static_cast<std::size_t>(c)) *
          cross_entropy(est.logits, c);
  l.box = lw.fusion_box * box_l1(annotation, est);
  l.giou = lw.fusion_giou * giou_loss(Aabb::from(annotation), estimate_box(est));
  l.orient = lw.fusion_orient * (1.0 - std::cos(annotation.psi - est.box[4]));
  l.total = l.cls + l.box + l.giou + l.orient;
  return l;
}

double no_object_loss(const FusedEstimate& est, const LossWeights& lw) {
  return lw.fusion_cls * lw.no_object_weight *
         cross_entropy(est.logits, static_cast<int>(est.logits.size()) - 1);
}

LossBreakdown fusion_loss(const std::vector<ObjectState>& annotations,
                          const std::vector<FusedEstimate>& estimates,
                          const SlotMatch& match, const LossWeights& lw) {
  LossBreakdown sum;
  for (const auto& [g, n] : match.pairs) {
    const LossBreakdown p = pair_loss(annotations.at(static_cast<std::size_t>(g)),
                                      estimates.at(static_cast<std::size_t>(n)), lw);
    sum.cls += p.cls;
    sum.box += p.box;
    sum.giou += p.giou;
    sum.orient += p.orient;
  }
  for (int n : match.unmatched) {
    sum.cls += no_object_loss(estimates.at(static_cast<std::size_t>(n)), lw);
  }
  const double slots = std::max<std::size_t>(estimates.size(), 1);
  sum.cls /= slots;
  sum.box /= slots;
  sum.giou /= slots;
  sum.orient /= slots;
  sum.total = sum.cls + sum.box + sum.giou + sum.orient;
  return sum;
}

std::vector<double> ens_raw_weights(const std::vector<long>& class_counts,
                                    double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ens: beta must lie in [0, 1)");
  }
  std::vector<double> w;
  w.reserve(class_counts.size());
  for (long n : class_counts) {
    if (n < 1) {
      throw std::invalid_argument("ens: class counts must be >= 1");
    }
    w.push_back((1.0 - beta) / (1.0 - std::pow(beta, static_cast<double>(n))));
  }
  return w;
}

std::vector<double> ens_class_weights(const std::vector<long>& class_counts,
                                      double beta) {
  std::vector<double> w = ens_raw_weights(class_counts, beta);
  if (w.empty()) return w;
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(w.size());
  for (double& v : w) v /= mean;
  return w;
}

}  // namespace objfusion
