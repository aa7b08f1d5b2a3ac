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

#include "objfusion/assignment.hpp"
#include "objfusion/pipeline_config.hpp"
#include "objfusion/types.hpp"

namespace objfusion {

/// Re-expresses an object in the ego frame dt seconds later, assuming
/// constant ego speed and yaw rate: rotate by -yaw_rate*dt about the origin,
/// then shift by -speed*dt along the new x-axis. Velocities rotate with the
/// frame and yaw drops by yaw_rate*dt. Covariance diagonal is rotated and
/// re-diagonalized.
TrackedObject ego_compensate(const TrackedObject& obj, const EgoMotion& ego,
                             double dt);

/// Exact inverse of ego_compensate followed by cv_predict over dt, used to
/// place ground truth at an earlier sensor timestamp. State only.
ObjectState cv_backtrack(const ObjectState& state_at_t, const EgoMotion& ego,
                         double dt);

/// Constant-velocity prediction over dt; diag(F P F^T) + q * dt.
TrackedObject cv_predict(const TrackedObject& obj, double dt,
                         const DiagCovariance& q_diag);

/// Sum over `dims` of residual^2 / (P_pred + P_meas); the yaw residual is
/// wrapped. Throws std::domain_error on a zero combined variance.
double mahalanobis_sq(const TrackedObject& pred, const TrackedObject& meas,
                      const std::vector<StateIndex>& dims);

/// Two-stage association: inflated AABB overlap, then Mahalanobis cost,
/// augmented with birth columns at the chi-squared gate and solved with the
/// auction algorithm. `globals` must already be predicted to the frame time.
Assignment associate(const SensorFrame& frame, const GlobalObjectSet& globals,
                     const PipelineConfig& cfg);

/// Per-component Kalman update with diagonal matrices:
///   S = P_g + P_m + extra, K = P_g / S, x += K (z - x), P = (1 - K) P_g.
/// Class follows the more confident participant, s_c fuses as max and s_e
/// as a noisy-OR. Throws std::domain_error if any S is zero.
TrackedObject akf_update(const TrackedObject& global,
                         const TrackedObject& meas,
                         const DiagCovariance& extra);

/// Drops detections whose s_e is below their sensor's existence threshold.
SampleBuffer filter_by_existence(const SampleBuffer& buf,
                                 const PipelineConfig& cfg);

/// Sequential time-sorted fusion of one sample. The global object set is
/// local to the call.
GlobalObjectSet fuse_sample(const SampleBuffer& buf, const PipelineConfig& cfg);

/// filter_by_existence followed by fuse_sample.
class AkfFuser {
 public:
  explicit AkfFuser(PipelineConfig cfg);

  GlobalObjectSet operator()(const SampleBuffer& buf) const;
  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
};

}  // namespace objfusion
