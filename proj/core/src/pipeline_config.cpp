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
#include "objfusion/pipeline_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace objfusion {
namespace {

using nlohmann::json;

json cov_to_json(const DiagCovariance& p) {
  json j = json::object();
  for (int d = 0; d < kStateDim; ++d) {
    j[std::string(to_string(static_cast<StateIndex>(d)))] = p[d];
  }
  return j;
}

DiagCovariance cov_from_json(const json& j) {
  DiagCovariance p;
  for (int d = 0; d < kStateDim; ++d) {
    p[d] = j.value(std::string(to_string(static_cast<StateIndex>(d))), 0.0);
  }
  return p;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("PipelineConfig: alpha must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("PipelineConfig: epsilon must be positive");
  }
  if (!(kappa >= 0.0)) {
    throw std::invalid_argument("PipelineConfig: kappa must be non-negative");
  }
  objfusion::validate(q_diag);
  for (const auto& e : extra_meas_cov) {
    objfusion::validate(e);
  }
  if (assoc_dims.empty()) {
    throw std::invalid_argument("PipelineConfig: assoc_dims is empty");
  }
  auto dims = assoc_dims;
  std::sort(dims.begin(), dims.end());
  if (std::adjacent_find(dims.begin(), dims.end()) != dims.end()) {
    throw std::invalid_argument("PipelineConfig: duplicate assoc_dims");
  }
}

bool PipelineConfig::is_akfa() const {
  for (const auto& e : extra_meas_cov) {
    for (double v : e.var) {
      if (v != 0.0) return true;
    }
  }
  return false;
}

std::string PipelineConfig::to_json(int indent) const {
  json j;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  j["q_diag"] = cov_to_json(q_diag);
  json extra = json::object();
  for (int t = 0; t < kNumSensorTypes; ++t) {
    extra[std::string(to_string(static_cast<SensorType>(t)))] =
        cov_to_json(extra_meas_cov[static_cast<std::size_t>(t)]);
  }
  j["extra_meas_cov"] = extra;
  json dims = json::array();
  for (StateIndex d : assoc_dims) {
    dims.push_back(std::string(to_string(d)));
  }
  j["assoc_dims"] = dims;
  json thr = json::object();
  for (int s = 0; s < kNumSensors; ++s) {
    thr[std::string(to_string(static_cast<SensorId>(s)))] =
        existence_thresholds[static_cast<std::size_t>(s)];
  }
  j["existence_thresholds"] = thr;
  j["output_conf_threshold"] = output_conf_threshold;
  j["kappa"] = kappa;
  j["ego_compensation"] = ego_compensation;
  return j.dump(indent);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  PipelineConfig c;
  c.alpha = j.value("alpha", c.alpha);
  c.epsilon = j.value("epsilon", c.epsilon);
  if (j.contains("q_diag")) c.q_diag = cov_from_json(j.at("q_diag"));
  if (j.contains("extra_meas_cov")) {
    for (const auto& [name, value] : j.at("extra_meas_cov").items()) {
      const auto t = name == "camera" ? SensorType::kCamera
                     : name == "radar"
                         ? SensorType::kRadar
                         : throw std::invalid_argument(
                               "PipelineConfig: unknown sensor type " + name);
      c.extra_meas_cov[static_cast<std::size_t>(t)] = cov_from_json(value);
    }
  }
  if (j.contains("assoc_dims")) {
    c.assoc_dims.clear();
    for (const auto& d : j.at("assoc_dims")) {
      c.assoc_dims.push_back(state_index_from_string(d.get<std::string>()));
    }
  }
  if (j.contains("existence_thresholds")) {
    for (const auto& [name, value] : j.at("existence_thresholds").items()) {
      c.existence_thresholds[static_cast<std::size_t>(
          sensor_from_string(name))] = value.get<double>();
    }
  }
  c.output_conf_threshold =
      j.value("output_conf_threshold", c.output_conf_threshold);
  c.kappa = j.value("kappa", c.kappa);
  c.ego_compensation = j.value("ego_compensation", c.ego_compensation);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void PipelineConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write config: " + path);
  }
  out << to_json() << '\n';
}

}  // namespace objfusion
