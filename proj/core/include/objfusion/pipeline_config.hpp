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

#include <array>
#include <string>
#include <vector>

#include "objfusion/types.hpp"

namespace objfusion {

/// Every tuned scalar of the Kalman fusion path. Plain AKF is the special
/// case where every extra_meas_cov entry is zero; AKFA tunes them per sensor
/// type.
struct PipelineConfig {
  /// Gate significance; the birth threshold is chi2_ppf(1 - alpha, |assoc_dims|).
  double alpha = 0.01;
  /// Final auction slackness.
  double epsilon = 0.01;
  /// Process noise per second, scaled linearly with dt.
  DiagCovariance q_diag = DiagCovariance{{0.05, 0.05, 0.01, 0.01, 0.5, 0.5, 0.01}};
  std::array<DiagCovariance, kNumSensorTypes> extra_meas_cov{};
  std::vector<StateIndex> assoc_dims{kX, kY, kVx, kVy};
  std::array<double, kNumSensors> existence_thresholds{};
  /// Fused objects with s_e below this are dropped from the output.
  double output_conf_threshold = 0.0;
  /// Inflation in standard deviations for the geometric pre-association.
  double kappa = 1.0;
  bool ego_compensation = true;

  bool operator==(const PipelineConfig&) const = default;

  /// Throws std::invalid_argument on alpha outside (0, 1), epsilon <= 0,
  /// negative variances, empty or duplicate assoc_dims, or kappa < 0.
  void validate() const;

  bool is_akfa() const;

  std::string to_json(int indent = 2) const;
  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace objfusion
