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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "objfusion/types.hpp"

namespace objfusion {

using Rng = std::mt19937_64;

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

/// Object-list sensor stand-in: a field-of-view sector around the ego origin,
/// additive Gaussian noise, and a reported covariance that may understate
/// the true noise (reported_cov_scale < 1 makes the sensor overconfident).
struct SensorModel {
  SensorId id = SensorId::kCamera;
  double azimuth_center = 0.0;      // rad
  double azimuth_half_width = 0.5;  // rad
  double max_range = 100.0;         // m
  StateVector noise_std{};          // per [x y l w vx vy psi]
  double reported_cov_scale = 1.0;
  double detection_prob = 1.0;
  double clutter_rate = 0.0;  // mean clutter objects per frame
  double latency_min = 0.0;   // s
  double latency_max = 0.04;  // s
  double class_confusion_prob = 0.05;
  BetaParams true_existence{8.0, 2.0};
  BetaParams clutter_existence{2.0, 6.0};
  BetaParams true_class_score{9.0, 1.5};
  BetaParams clutter_class_score{3.0, 3.0};

  void validate() const;
  bool in_fov(double x, double y) const;
};

struct ClassShape {
  double length_mean = 4.5;
  double length_std = 0.3;
  double width_mean = 1.8;
  double width_std = 0.1;
  double speed_min = 0.0;
  double speed_max = 10.0;
};

struct DomainPreset {
  std::string name = "highway";
  int min_objects = 2;
  int max_objects = 15;
  std::array<double, kNumClasses> class_mix{0.8, 0.13, 0.04, 0.015, 0.015};
  std::array<ClassShape, kNumClasses> shapes{};
  double x_mean = 0.0;
  double x_std = 45.0;
  double y_mean = 0.0;
  double y_std = 5.0;
  /// Fraction of objects moving across the ego heading (urban crossings).
  double crossing_fraction = 0.0;
  double heading_std = 0.05;  // rad around the travel direction
  double ego_speed_min = 22.0;
  double ego_speed_max = 36.0;
  double ego_yaw_rate_std = 0.01;
  double fov_half_extent = 100.0;
  int rejection_budget = 5000;
  std::vector<SensorModel> sensors;

  void validate() const;

  /// Broad longitudinal and narrow lateral spread; cars, then trucks and
  /// motorcycles.
  static DomainPreset highway();
  /// Narrower longitudinal and broader lateral spread; more bicycles and
  /// pedestrians.
  static DomainPreset urban();
  static DomainPreset by_name(const std::string& name);

  std::string to_json(int indent = 2) const;
  static DomainPreset from_json(const std::string& text);
};

/// Front camera (+-30 deg, 100 m) and four corner radars (+-75 deg, 80 m).
std::vector<SensorModel> default_sensor_rig();

/// One sample: sensor frames and ground truth at annotation time t_A.
struct DatasetRecord {
  std::string sample_id;
  int session = 0;
  double annotation_time = 0.0;
  EgoMotion ego;
  std::vector<SensorFrame> frames;
  std::vector<ObjectState> annotations;

  SampleBuffer buffer() const;
  bool operator==(const DatasetRecord&) const = default;
};

/// Draws G <= 20 non-overlapping ground-truth objects inside the FoV square.
/// Throws std::runtime_error when the rejection budget runs out.
std::vector<ObjectState> generate_scene(const DomainPreset& preset, Rng& rng);
std::vector<ObjectState> generate_scene(const DomainPreset& preset,
                                        std::uint64_t seed);

/// Detects, perturbs and clutters the annotations (given at t_A) for one
/// sensor. Ground truth is moved back to the frame's arrival time with the
/// same ego-frame CV model the fusion pipeline uses.
SensorFrame simulate_sensor(const std::vector<ObjectState>& annotations,
                            const SensorModel& sm, Rng& rng,
                            double annotation_time, const EgoMotion& ego);

/// Full sample: scene, ego motion, one frame per sensor.
DatasetRecord generate_record(const DomainPreset& preset, Rng& rng,
                              std::string sample_id, int session,
                              double annotation_time);

/// Per sensor type (camera, radar) s_e threshold.
using ConfidenceThresholds = std::array<double, kNumSensorTypes>;

/// Linear-interpolated empirical quantile of `values` at `fraction`.
double empirical_quantile(std::vector<double> values, double fraction);

/// Quantile of s_e over detections that overlap an annotation, per sensor
/// type. Types without such detections get 0.
ConfidenceThresholds calibrate_confidence_thresholds(
    const std::vector<DatasetRecord>& records, double fraction);

/// Removes detections and annotations outside |x|, |y| <= fov_half_extent,
/// then removes detections below their type's threshold that overlap no
/// annotation.
DatasetRecord apply_filters(const DatasetRecord& record, double fov_half_extent,
                            const ConfidenceThresholds& thresholds);

struct SplitRatios {
  double train = 0.75;
  double val = 0.15;
  double test = 0.10;
};

struct DatasetConfig {
  DomainPreset preset = DomainPreset::highway();
  int n_samples = 1000;
  int samples_per_session = 50;
  SplitRatios ratios;
  std::uint64_t seed = 7;
  double confidence_quantile = 0.05;
  int jobs = 1;
};

struct Dataset {
  std::string domain;
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> val;
  std::vector<DatasetRecord> test;
  ConfidenceThresholds thresholds{};
  /// session id -> "train" / "val" / "test"
  std::vector<std::pair<int, std::string>> session_split;
  std::string config_json;

  std::size_t size() const { return train.size() + val.size() + test.size(); }
};

/// Sessions of consecutive 40 ms samples, each with its own seeded stream;
/// whole sessions are assigned to splits.
Dataset generate_dataset(const DatasetConfig& cfg);

/// Every second sample of each domain's split, so the combined splits keep
/// the single-domain sizes.
Dataset combine_datasets(const Dataset& a, const Dataset& b);

}  // namespace objfusion
