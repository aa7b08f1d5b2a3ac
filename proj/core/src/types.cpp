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
#include "objfusion/types.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "objfusion/geometry.hpp"

namespace objfusion {
namespace {

constexpr std::array<std::string_view, kNumClasses + 1> kClassNames = {
    "car", "truck", "motorcycle", "bicycle", "pedestrian", "no_object"};
constexpr std::array<std::string_view, kNumSensors> kSensorNames = {
    "camera", "radar_fl", "radar_fr", "radar_rl", "radar_rr"};
constexpr std::array<std::string_view, kStateDim> kStateNames = {
    "x", "y", "l", "w", "vx", "vy", "psi"};

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view to_string(ObjectClass c) {
  return kClassNames.at(static_cast<std::size_t>(c));
}

ObjectClass class_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) {
      return static_cast<ObjectClass>(i);
    }
  }
  throw std::invalid_argument("unknown class: " + std::string(name));
}

std::string_view to_string(SensorId id) {
  return kSensorNames.at(static_cast<std::size_t>(id));
}

SensorId sensor_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSensorNames.size(); ++i) {
    if (kSensorNames[i] == name) {
      return static_cast<SensorId>(i);
    }
  }
  throw std::invalid_argument("unknown sensor: " + std::string(name));
}

std::string_view to_string(SensorType t) {
  return t == SensorType::kCamera ? "camera" : "radar";
}

std::string_view to_string(StateIndex i) {
  return kStateNames.at(static_cast<std::size_t>(i));
}

StateIndex state_index_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (kStateNames[i] == name) {
      return static_cast<StateIndex>(i);
    }
  }
  throw std::invalid_argument("unknown state component: " + std::string(name));
}

void ObjectState::set_kinematics(const StateVector& v) {
  x = v[kX];
  y = v[kY];
  l = v[kL];
  w = v[kW];
  vx = v[kVx];
  vy = v[kVy];
  psi = v[kPsi];
}

void validate(const ObjectState& o) {
  for (double v : o.kinematics()) {
    if (!finite(v)) {
      throw std::invalid_argument("ObjectState: non-finite component");
    }
  }
  if (!(o.l > 0.0) || !(o.w > 0.0)) {
    throw std::invalid_argument("ObjectState: extents must be positive");
  }
  if (!(o.psi > -kPi) || o.psi > kPi) {
    throw std::invalid_argument("ObjectState: psi outside (-pi, pi]");
  }
  if (!(o.s_e >= 0.0 && o.s_e <= 1.0) || !(o.s_c >= 0.0 && o.s_c <= 1.0)) {
    throw std::invalid_argument("ObjectState: scores outside [0, 1]");
  }
  if (o.cls == ObjectClass::kNoObject) {
    throw std::invalid_argument("ObjectState: NoObject is not a valid class");
  }
}

DiagCovariance DiagCovariance::uniform(double v) {
  DiagCovariance p;
  p.var.fill(v);
  return p;
}

void validate(const DiagCovariance& p) {
  for (double v : p.var) {
    if (!(v >= 0.0) || !finite(v)) {
      throw std::invalid_argument("DiagCovariance: negative or non-finite");
    }
  }
}

std::size_t SampleBuffer::detection_count() const {
  std::size_t n = 0;
  for (const auto& f : frames) {
    n += f.objects.size();
  }
  return n;
}

}  // namespace objfusion
