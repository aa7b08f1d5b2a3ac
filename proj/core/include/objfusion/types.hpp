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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace objfusion {

/// Object classes. NoObject is the extra slot label used only by the
/// transformer fusion; the Kalman path never emits it.
enum class ObjectClass : int {
  kCar = 0,
  kTruck = 1,
  kMotorcycle = 2,
  kBicycle = 3,
  kPedestrian = 4,
  kNoObject = 5,
};

inline constexpr int kNumClasses = 5;  // excluding NoObject
inline constexpr int kNoObjectIndex = kNumClasses;

std::string_view to_string(ObjectClass c);
ObjectClass class_from_string(std::string_view name);

enum class SensorId : int {
  kCamera = 0,
  kRadarFL = 1,
  kRadarFR = 2,
  kRadarRL = 3,
  kRadarRR = 4,
};

inline constexpr int kNumSensors = 5;

enum class SensorType : int { kCamera = 0, kRadar = 1 };
inline constexpr int kNumSensorTypes = 2;

constexpr SensorType sensor_type(SensorId id) {
  return id == SensorId::kCamera ? SensorType::kCamera : SensorType::kRadar;
}

std::string_view to_string(SensorId id);
SensorId sensor_from_string(std::string_view name);
std::string_view to_string(SensorType t);

/// Index into the 7-component kinematic/extent state [x, y, l, w, vx, vy, psi].
enum StateIndex : int {
  kX = 0,
  kY = 1,
  kL = 2,
  kW = 3,
  kVx = 4,
  kVy = 5,
  kPsi = 6,
};

inline constexpr int kStateDim = 7;
using StateVector = std::array<double, kStateDim>;

std::string_view to_string(StateIndex i);
StateIndex state_index_from_string(std::string_view name);

/// o = [x, y, l, w, vx, vy, psi, c, s_e, s_c] in the ego frame
/// (x forward, y left, psi counter-clockwise from x).
struct ObjectState {
  double x = 0.0;
  double y = 0.0;
  double l = 1.0;
  double w = 1.0;
  double vx = 0.0;
  double vy = 0.0;
  double psi = 0.0;
  ObjectClass cls = ObjectClass::kCar;
  double s_e = 1.0;
  double s_c = 1.0;

  StateVector kinematics() const { return {x, y, l, w, vx, vy, psi}; }
  void set_kinematics(const StateVector& v);

  bool operator==(const ObjectState&) const = default;
};

/// Throws std::invalid_argument when an invariant (positive extent, wrapped
/// yaw, scores in [0, 1], finite values) is violated.
void validate(const ObjectState& o);

/// Diagonal of P over [x, y, l, w, vx, vy, psi].
struct DiagCovariance {
  StateVector var{};

  double& operator[](int i) { return var[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return var[static_cast<std::size_t>(i)]; }

  static DiagCovariance zero() { return {}; }
  static DiagCovariance uniform(double v);

  bool operator==(const DiagCovariance&) const = default;
};

void validate(const DiagCovariance& p);

/// A sensor track: state plus its reported uncertainty.
struct TrackedObject {
  ObjectState state;
  DiagCovariance cov;

  bool operator==(const TrackedObject&) const = default;
};

struct SensorFrame {
  SensorId sensor = SensorId::kCamera;
  double arrival_time = 0.0;  // s
  std::vector<TrackedObject> objects;

  bool operator==(const SensorFrame&) const = default;
};

struct EgoMotion {
  double speed = 0.0;     // m/s
  double yaw_rate = 0.0;  // rad/s

  bool operator==(const EgoMotion&) const = default;
};

/// The most recent frame of every sensor at annotation time t_A.
struct SampleBuffer {
  double annotation_time = 0.0;  // t_A, s
  std::vector<SensorFrame> frames;
  EgoMotion ego;

  std::size_t detection_count() const;

  bool operator==(const SampleBuffer&) const = default;
};

/// Fused output of either fusion path for one sample.
using GlobalObjectSet = std::vector<TrackedObject>;

}  // namespace objfusion
