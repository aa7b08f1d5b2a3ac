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

#include <utility>
#include <vector>

#include "objfusion/hilo_model.hpp"
#include "objfusion/types.hpp"

namespace objfusion {

struct LossWeights {
  // Matching cost.
  double match_cls = 1.0;
  double match_box = 1.0;
  double match_giou = 1.0;
  // Fusion loss.
  double fusion_cls = 2.0;
  double fusion_box = 1.0;
  double fusion_giou = 1.0;
  double fusion_orient = 1.0;
  /// Per real class, typically from ens_class_weights().
  std::vector<double> class_weights = std::vector<double>(kNumClasses, 1.0);
  double no_object_weight = 0.1;
  double ens_beta = 0.99;

  void validate() const;
};

/// Hungarian matching cost of one annotation against one estimate:
///   -match_cls * logit[c_g] + match_box * L1([x y l w]) + match_giou * (1 - gIoU).
double matching_cost(const ObjectState& annotation, const FusedEstimate& est,
                     const LossWeights& lw);

struct SlotMatch {
  /// (annotation index, estimate index)
  std::vector<std::pair<int, int>> pairs;
  /// Estimates left for the NoObject target.
  std::vector<int> unmatched;
  double total_cost = 0.0;
};

/// Optimal one-to-one matching of G annotations into N slots. Throws
/// std::invalid_argument when G > N.
SlotMatch hungarian_match_sample(const std::vector<ObjectState>& annotations,
                                 const std::vector<FusedEstimate>& estimates,
                                 const LossWeights& lw);

struct LossBreakdown {
  double cls = 0.0;
  double box = 0.0;
  double giou = 0.0;
  double orient = 0.0;
  double total = 0.0;
};

/// Weighted terms of one matched pair (not averaged).
LossBreakdown pair_loss(const ObjectState& annotation, const FusedEstimate& est,
                        const LossWeights& lw);

/// Classification-only term of a slot trained towards NoObject.
double no_object_loss(const FusedEstimate& est, const LossWeights& lw);

/// Sample loss: sum of pair and NoObject terms divided by the slot count.
LossBreakdown fusion_loss(const std::vector<ObjectState>& annotations,
                          const std::vector<FusedEstimate>& estimates,
                          const SlotMatch& match, const LossWeights& lw);

/// (1 - beta) / (1 - beta^n_c) per class, before normalization.
std::vector<double> ens_raw_weights(const std::vector<long>& class_counts,
                                    double beta);

/// ens_raw_weights normalized to mean 1. Throws std::invalid_argument for a
/// count below 1 or beta outside [0, 1).
std::vector<double> ens_class_weights(const std::vector<long>& class_counts,
                                      double beta);

}  // namespace objfusion
