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
#include "objfusion/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "objfusion/akf.hpp"
#include "objfusion/geometry.hpp"
#include "objfusion/parallel.hpp"

namespace objfusion {
namespace {

using nlohmann::json;

constexpr int kMaxAnnotations = 20;
constexpr double kSampleCadence = 0.04;  // s
constexpr double kMinExtent = 0.1;       // m

double sample_beta(Rng& rng, const BetaParams& p) {
  std::gamma_distribution<double> ga(p.a, 1.0);
  std::gamma_distribution<double> gb(p.b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double normal(Rng& rng, double mean, double std) {
  if (std <= 0.0) return mean;
  return std::normal_distribution<double>(mean, std)(rng);
}

ObjectClass sample_class(Rng& rng, const std::array<double, kNumClasses>& mix) {
  std::discrete_distribution<int> d(mix.begin(), mix.end());
  return static_cast<ObjectClass>(d(rng));
}

ObjectClass confuse(Rng& rng, ObjectClass truth) {
  std::uniform_int_distribution<int> d(0, kNumClasses - 2);
  int c = d(rng);
  if (c >= static_cast<int>(truth)) ++c;
  return static_cast<ObjectClass>(c);
}

std::array<ClassShape, kNumClasses> shapes_for(bool highway) {
  std::array<ClassShape, kNumClasses> s{};
  s[0] = {4.6, 0.35, 1.85, 0.1, highway ? 20.0 : 0.0, highway ? 38.0 : 14.0};
  s[1] = {12.0, 3.0, 2.5, 0.1, highway ? 20.0 : 0.0, highway ? 25.0 : 12.0};
  s[2] = {2.2, 0.15, 0.8, 0.08, highway ? 20.0 : 0.0, highway ? 40.0 : 15.0};
  s[3] = {1.8, 0.1, 0.7, 0.08, 0.0, 7.0};
  s[4] = {0.6, 0.1, 0.6, 0.1, 0.0, 2.0};
  return s;
}

SensorModel radar(SensorId id, double center) {
  SensorModel m;
  m.id = id;
  m.azimuth_center = center;
  m.azimuth_half_width = 75.0 * kPi / 180.0;
  m.max_range = 80.0;
  m.noise_std = {0.3, 0.6, 1.0, 0.4, 0.3, 0.8, 0.15};
  m.detection_prob = 0.85;
  m.clutter_rate = 0.5;
  return m;
}

json beta_json(const BetaParams& b) { return json::array({b.a, b.b}); }
BetaParams beta_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json sensor_json(const SensorModel& m) {
  return json{{"id", std::string(to_string(m.id))},
              {"azimuth_center", m.azimuth_center},
              {"azimuth_half_width", m.azimuth_half_width},
              {"max_range", m.max_range},
              {"noise_std", m.noise_std},
              {"reported_cov_scale", m.reported_cov_scale},
              {"detection_prob", m.detection_prob},
              {"clutter_rate", m.clutter_rate},
              {"latency_min", m.latency_min},
              {"latency_max", m.latency_max},
              {"class_confusion_prob", m.class_confusion_prob},
              {"true_existence", beta_json(m.true_existence)},
              {"clutter_existence", beta_json(m.clutter_existence)},
              {"true_class_score", beta_json(m.true_class_score)},
              {"clutter_class_score", beta_json(m.clutter_class_score)}};
}

SensorModel sensor_from(const json& j) {
  SensorModel m;
  m.id = sensor_from_string(j.at("id").get<std::string>());
  m.azimuth_center = j.at("azimuth_center").get<double>();
  m.azimuth_half_width = j.at("azimuth_half_width").get<double>();
  m.max_range = j.at("max_range").get<double>();
  m.noise_std = j.at("noise_std").get<StateVector>();
  m.reported_cov_scale = j.at("reported_cov_scale").get<double>();
  m.detection_prob = j.at("detection_prob").get<double>();
  m.clutter_rate = j.at("clutter_rate").get<double>();
  m.latency_min = j.at("latency_min").get<double>();
  m.latency_max = j.at("latency_max").get<double>();
  m.class_confusion_prob = j.value("class_confusion_prob", 0.05);
  if (j.contains("true_existence")) m.true_existence = beta_from(j.at("true_existence"));
  if (j.contains("clutter_existence")) m.clutter_existence = beta_from(j.at("clutter_existence"));
  if (j.contains("true_class_score")) m.true_class_score = beta_from(j.at("true_class_score"));
  if (j.contains("clutter_class_score")) m.clutter_class_score = beta_from(j.at("clutter_class_score"));
  return m;
}

bool in_square(const ObjectState& o, double half) {
  return std::fabs(o.x) <= half && std::fabs(o.y) <= half;
}

bool overlaps_any_annotation(const ObjectState& det,
                             const std::vector<ObjectState>& annotations) {
  const Aabb box = Aabb::from(det);
  return std::any_of(annotations.begin(), annotations.end(),
                     [&](const ObjectState& a) { return overlaps(box, Aabb::from(a)); });
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Rng session_rng(std::uint64_t seed, const std::string& domain, int session) {
  const std::uint64_t h = name_hash(domain);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(session)};
  return Rng(seq);
}

}  // namespace

void SensorModel::validate() const {
  if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
    throw std::invalid_argument("SensorModel: detection_prob outside [0, 1]");
  }
  if (!(reported_cov_scale > 0.0)) {
    throw std::invalid_argument("SensorModel: reported_cov_scale must be positive");
  }
  if (!(max_range > 0.0) || !(azimuth_half_width > 0.0)) {
    throw std::invalid_argument("SensorModel: empty field of view");
  }
  if (clutter_rate < 0.0 || latency_min < 0.0 || latency_max < latency_min) {
    throw std::invalid_argument("SensorModel: invalid clutter or latency");
  }
  for (double s : noise_std) {
    if (!(s >= 0.0)) throw std::invalid_argument("SensorModel: negative noise");
  }
}

bool SensorModel::in_fov(double x, double y) const {
  if (std::hypot(x, y) > max_range) return false;
  if (azimuth_half_width >= kPi) return true;
  const double az = std::atan2(y, x);
  return std::fabs(wrap_angle(az - azimuth_center)) <= azimuth_half_width;
}

std::vector<SensorModel> default_sensor_rig() {
  SensorModel cam;
  cam.id = SensorId::kCamera;
  cam.azimuth_center = 0.0;
  cam.azimuth_half_width = 30.0 * kPi / 180.0;
  cam.max_range = 100.0;
  cam.noise_std = {1.2, 0.3, 0.6, 0.2, 1.0, 0.5, 0.05};
  cam.detection_prob = 0.9;
  cam.clutter_rate = 0.3;
  return {cam,
          radar(SensorId::kRadarFL, 45.0 * kPi / 180.0),
          radar(SensorId::kRadarFR, -45.0 * kPi / 180.0),
          radar(SensorId::kRadarRL, 135.0 * kPi / 180.0),
          radar(SensorId::kRadarRR, -135.0 * kPi / 180.0)};
}

void DomainPreset::validate() const {
  const double sum = std::accumulate(class_mix.begin(), class_mix.end(), 0.0);
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("DomainPreset: class mix must sum to 1");
  }
  if (!(x_std > 0.0) || !(y_std > 0.0)) {
    throw std::invalid_argument("DomainPreset: spreads must be positive");
  }
  if (min_objects < 0 || max_objects < min_objects || max_objects > kMaxAnnotations) {
    throw std::invalid_argument("DomainPreset: object count must lie in [0, 20]");
  }
  for (const auto& s : sensors) s.validate();
}

DomainPreset DomainPreset::highway() {
  DomainPreset p;
  p.name = "highway";
  p.min_objects = 2;
  p.max_objects = 14;
  p.class_mix = {0.80, 0.13, 0.04, 0.015, 0.015};
  p.shapes = shapes_for(true);
  p.x_std = 45.0;
  p.y_std = 5.0;
  p.crossing_fraction = 0.0;
  p.ego_speed_min = 22.0;
  p.ego_speed_max = 36.0;
  p.ego_yaw_rate_std = 0.01;
  p.sensors = default_sensor_rig();
  return p;
}

DomainPreset DomainPreset::urban() {
  DomainPreset p;
  p.name = "urban";
  p.min_objects = 3;
  p.max_objects = 16;
  p.class_mix = {0.76, 0.03, 0.02, 0.09, 0.10};
  p.shapes = shapes_for(false);
  p.x_std = 22.0;
  p.y_std = 14.0;
  p.crossing_fraction = 0.3;
  p.heading_std = 0.1;
  p.ego_speed_min = 0.0;
  p.ego_speed_max = 14.0;
  p.ego_yaw_rate_std = 0.08;
  p.sensors = default_sensor_rig();
  return p;
}

DomainPreset DomainPreset::by_name(const std::string& name) {
  if (name == "highway" || name == "hw") return highway();
  if (name == "urban" || name == "urb") return urban();
  throw std::invalid_argument("unknown preset: " + name);
}

std::string DomainPreset::to_json(int indent) const {
  json shapes = json::array();
  for (const auto& s : this->shapes) {
    shapes.push_back({{"length_mean", s.length_mean}, {"length_std", s.length_std},
                      {"width_mean", s.width_mean}, {"width_std", s.width_std},
                      {"speed_min", s.speed_min}, {"speed_max", s.speed_max}});
  }
  json sensors_j = json::array();
  for (const auto& s : sensors) sensors_j.push_back(sensor_json(s));
  const json j = {{"name", name},
                  {"min_objects", min_objects},
                  {"max_objects", max_objects},
                  {"class_mix", class_mix},
                  {"shapes", shapes},
                  {"x_mean", x_mean},
                  {"x_std", x_std},
                  {"y_mean", y_mean},
                  {"y_std", y_std},
                  {"crossing_fraction", crossing_fraction},
                  {"heading_std", heading_std},
                  {"ego_speed_min", ego_speed_min},
                  {"ego_speed_max", ego_speed_max},
                  {"ego_yaw_rate_std", ego_yaw_rate_std},
                  {"fov_half_extent", fov_half_extent},
                  {"rejection_budget", rejection_budget},
                  {"sensors", sensors_j}};
  return j.dump(indent);
}

DomainPreset DomainPreset::from_json(const std::string& text) {
  const json j = json::parse(text);
  DomainPreset p = by_name(j.value("name", std::string("highway")) == "urban" ? "urban" : "highway");
  p.name = j.value("name", p.name);
  p.min_objects = j.value("min_objects", p.min_objects);
  p.max_objects = j.value("max_objects", p.max_objects);
  if (j.contains("class_mix")) p.class_mix = j.at("class_mix").get<std::array<double, kNumClasses>>();
  if (j.contains("shapes")) {
    for (std::size_t i = 0; i < p.shapes.size(); ++i) {
      const json& s = j.at("shapes").at(i);
      p.shapes[i] = {s.at("length_mean"), s.at("length_std"), s.at("width_mean"),
                     s.at("width_std"), s.at("speed_min"), s.at("speed_max")};
    }
  }
  p.x_mean = j.value("x_mean", p.x_mean);
  p.x_std = j.value("x_std", p.x_std);
  p.y_mean = j.value("y_mean", p.y_mean);
  p.y_std = j.value("y_std", p.y_std);
  p.crossing_fraction = j.value("crossing_fraction", p.crossing_fraction);
  p.heading_std = j.value("heading_std", p.heading_std);
  p.ego_speed_min = j.value("ego_speed_min", p.ego_speed_min);
  p.ego_speed_max = j.value("ego_speed_max", p.ego_speed_max);
  p.ego_yaw_rate_std = j.value("ego_yaw_rate_std", p.ego_yaw_rate_std);
  p.fov_half_extent = j.value("fov_half_extent", p.fov_half_extent);
  p.rejection_budget = j.value("rejection_budget", p.rejection_budget);
  if (j.contains("sensors")) {
    p.sensors.clear();
    for (const auto& s : j.at("sensors")) p.sensors.push_back(sensor_from(s));
  }
  p.validate();
  return p;
}

SampleBuffer DatasetRecord::buffer() const {
  SampleBuffer b;
  b.annotation_time = annotation_time;
  b.frames = frames;
  b.ego = ego;
  return b;
}

std::vector<ObjectState> generate_scene(const DomainPreset& preset, Rng& rng) {
  preset.validate();
  std::uniform_int_distribution<int> count(preset.min_objects, preset.max_objects);
  const int g = count(rng);
  const Aabb ego_box(1.5, 0.0, 5.5, 2.4);
  std::vector<ObjectState> scene;
  int attempts = 0;
  while (static_cast<int>(scene.size()) < g) {
    if (++attempts > preset.rejection_budget) {
      throw std::runtime_error("generate_scene: rejection budget exhausted");
    }
    ObjectState o;
    o.cls = sample_class(rng, preset.class_mix);
    const ClassShape& shape = preset.shapes[static_cast<std::size_t>(o.cls)];
    o.l = std::max(normal(rng, shape.length_mean, shape.length_std), 0.3);
    o.w = std::max(normal(rng, shape.width_mean, shape.width_std), 0.3);
    o.x = normal(rng, preset.x_mean, preset.x_std);
    o.y = normal(rng, preset.y_mean, preset.y_std);
    if (std::fabs(o.x) + 0.5 * o.l > preset.fov_half_extent ||
        std::fabs(o.y) + 0.5 * o.w > preset.fov_half_extent) {
      continue;
    }
    const Aabb box = Aabb::from(o);
    const Aabb padded(box.cx(), box.cy(), box.l() + 1.0, box.w() + 0.5);
    if (overlaps(padded, ego_box) ||
        std::any_of(scene.begin(), scene.end(), [&](const ObjectState& other) {
          return overlaps(padded, Aabb::from(other));
        })) {
      continue;
    }
    double heading = 0.0;
    const bool vulnerable = o.cls == ObjectClass::kPedestrian;
    const double u = uniform(rng, 0.0, 1.0);
    if (vulnerable && preset.crossing_fraction > 0.0) {
      heading = uniform(rng, -kPi, kPi);
    } else if (u < preset.crossing_fraction) {
      heading = (uniform(rng, 0.0, 1.0) < 0.5 ? 0.5 : -0.5) * kPi;
    } else if (uniform(rng, 0.0, 1.0) < 0.2) {
      heading = kPi;  // oncoming traffic
    }
    o.psi = wrap_angle(normal(rng, heading, preset.heading_std));
    const double speed = uniform(rng, shape.speed_min, shape.speed_max);
    o.vx = speed * std::cos(o.psi);
    o.vy = speed * std::sin(o.psi);
    o.s_e = 1.0;
    o.s_c = 1.0;
    scene.push_back(o);
  }
  return scene;
}

std::vector<ObjectState> generate_scene(const DomainPreset& preset,
                                        std::uint64_t seed) {
  Rng rng(seed);
  return generate_scene(preset, rng);
}

SensorFrame simulate_sensor(const std::vector<ObjectState>& annotations,
                            const SensorModel& sm, Rng& rng,
                            double annotation_time, const EgoMotion& ego) {
  sm.validate();
  SensorFrame frame;
  frame.sensor = sm.id;
  const double latency = uniform(rng, sm.latency_min, sm.latency_max);
  frame.arrival_time = annotation_time - latency;

  DiagCovariance reported;
  for (int d = 0; d < kStateDim; ++d) {
    const double sd = sm.noise_std[static_cast<std::size_t>(d)];
    // Floor keeps downstream innovations non-singular for noiseless sensors.
    reported[d] = std::max(sd * sd * sm.reported_cov_scale, 1e-6);
  }

  std::bernoulli_distribution detect(sm.detection_prob);
  std::bernoulli_distribution confusion(sm.class_confusion_prob);
  for (const ObjectState& truth_now : annotations) {
    const ObjectState truth = cv_backtrack(truth_now, ego, latency);
    if (!sm.in_fov(truth.x, truth.y)) continue;
    if (!detect(rng)) continue;
    TrackedObject det;
    StateVector k = truth.kinematics();
    for (int d = 0; d < kStateDim; ++d) {
      k[static_cast<std::size_t>(d)] += normal(rng, 0.0, sm.noise_std[static_cast<std::size_t>(d)]);
    }
    k[kL] = std::max(k[kL], kMinExtent);
    k[kW] = std::max(k[kW], kMinExtent);
    k[kPsi] = wrap_angle(k[kPsi]);
    det.state.set_kinematics(k);
    det.state.cls = confusion(rng) ? confuse(rng, truth.cls) : truth.cls;
    det.state.s_e = sample_beta(rng, sm.true_existence);
    det.state.s_c = sample_beta(rng, sm.true_class_score);
    det.cov = reported;
    frame.objects.push_back(det);
  }

  if (sm.clutter_rate > 0.0) {
    std::poisson_distribution<int> n_clutter(sm.clutter_rate);
    const int n = n_clutter(rng);
    const auto shapes = shapes_for(false);
    for (int i = 0; i < n; ++i) {
      TrackedObject c;
      const double half = std::min(sm.azimuth_half_width, kPi);
      const double az = sm.azimuth_center + uniform(rng, -half, half);
      const double r = sm.max_range * std::sqrt(uniform(rng, 0.0, 1.0));
      c.state.x = r * std::cos(az);
      c.state.y = r * std::sin(az);
      c.state.cls = static_cast<ObjectClass>(
          std::uniform_int_distribution<int>(0, kNumClasses - 1)(rng));
      const ClassShape& shape = shapes[static_cast<std::size_t>(c.state.cls)];
      c.state.l = std::max(normal(rng, shape.length_mean, shape.length_std), kMinExtent);
      c.state.w = std::max(normal(rng, shape.width_mean, shape.width_std), kMinExtent);
      c.state.psi = uniform(rng, -kPi, kPi);
      c.state.psi = wrap_angle(c.state.psi);
      c.state.vx = normal(rng, 0.0, 3.0);
      c.state.vy = normal(rng, 0.0, 1.0);
      c.state.s_e = sample_beta(rng, sm.clutter_existence);
      c.state.s_c = sample_beta(rng, sm.clutter_class_score);
      c.cov = reported;
      frame.objects.push_back(c);
    }
  }
  return frame;
}

DatasetRecord generate_record(const DomainPreset& preset, Rng& rng,
                              std::string sample_id, int session,
                              double annotation_time) {
  DatasetRecord rec;
  rec.sample_id = std::move(sample_id);
  rec.session = session;
  rec.annotation_time = annotation_time;
  rec.ego.speed = uniform(rng, preset.ego_speed_min, preset.ego_speed_max);
  rec.ego.yaw_rate = normal(rng, 0.0, preset.ego_yaw_rate_std);
  rec.annotations = generate_scene(preset, rng);
  for (const auto& sm : preset.sensors) {
    rec.frames.push_back(simulate_sensor(rec.annotations, sm, rng, annotation_time, rec.ego));
  }
  return rec;
}

double empirical_quantile(std::vector<double> values, double fraction) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: no values");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("empirical_quantile: fraction outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = fraction * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

ConfidenceThresholds calibrate_confidence_thresholds(
    const std::vector<DatasetRecord>& records, double fraction) {
  std::array<std::vector<double>, kNumSensorTypes> scores;
  for (const auto& rec : records) {
    for (const auto& frame : rec.frames) {
      auto& bucket = scores[static_cast<std::size_t>(sensor_type(frame.sensor))];
      for (const auto& det : frame.objects) {
        if (overlaps_any_annotation(det.state, rec.annotations)) {
          bucket.push_back(det.state.s_e);
        }
      }
    }
  }
  ConfidenceThresholds out{};
  for (std::size_t t = 0; t < scores.size(); ++t) {
    out[t] = scores[t].empty() ? 0.0 : empirical_quantile(scores[t], fraction);
  }
  return out;
}

DatasetRecord apply_filters(const DatasetRecord& record, double fov_half_extent,
                            const ConfidenceThresholds& thresholds) {
  DatasetRecord out = record;
  std::erase_if(out.annotations, [&](const ObjectState& a) {
    return !in_square(a, fov_half_extent);
  });
  for (auto& frame : out.frames) {
    const double thr = thresholds[static_cast<std::size_t>(sensor_type(frame.sensor))];
    std::erase_if(frame.objects, [&](const TrackedObject& d) {
      if (!in_square(d.state, fov_half_extent)) return true;
      return d.state.s_e < thr && !overlaps_any_annotation(d.state, out.annotations);
    });
  }
  return out;
}

Dataset generate_dataset(const DatasetConfig& cfg) {
  cfg.preset.validate();
  const double ratio_sum = cfg.ratios.train + cfg.ratios.val + cfg.ratios.test;
  if (std::fabs(ratio_sum - 1.0) > 1e-9 || cfg.ratios.train < 0.0 ||
      cfg.ratios.val < 0.0 || cfg.ratios.test < 0.0) {
    throw std::invalid_argument("generate_dataset: split ratios must sum to 1");
  }
  if (cfg.n_samples < 0 || cfg.samples_per_session < 1) {
    throw std::invalid_argument("generate_dataset: invalid sample counts");
  }
  const int sps = cfg.samples_per_session;
  const int n_sessions = (cfg.n_samples + sps - 1) / sps;
  std::vector<std::vector<DatasetRecord>> sessions(static_cast<std::size_t>(n_sessions));
  parallel_for(sessions.size(), cfg.jobs, [&](std::size_t s) {
    Rng rng = session_rng(cfg.seed, cfg.preset.name, static_cast<int>(s));
    const int begin = static_cast<int>(s) * sps;
    const int end = std::min(cfg.n_samples, begin + sps);
    for (int i = begin; i < end; ++i) {
      char id[64];
      std::snprintf(id, sizeof(id), "%s-%04zu-%03d", cfg.preset.name.c_str(), s, i - begin);
      const double t_a = 1000.0 * static_cast<double>(s) + kSampleCadence * (i - begin);
      DatasetRecord rec = generate_record(cfg.preset, rng, id, static_cast<int>(s), t_a);
      sessions[s].push_back(apply_filters(rec, cfg.preset.fov_half_extent, ConfidenceThresholds{}));
    }
  });

  Dataset ds;
  ds.domain = cfg.preset.name;
  std::vector<DatasetRecord> all;
  for (const auto& s : sessions) all.insert(all.end(), s.begin(), s.end());
  ds.thresholds = calibrate_confidence_thresholds(all, cfg.confidence_quantile);
  for (auto& s : sessions) {
    for (auto& rec : s) rec = apply_filters(rec, cfg.preset.fov_half_extent, ds.thresholds);
  }

  std::vector<int> order(static_cast<std::size_t>(n_sessions));
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(cfg.seed ^ 0x5eed5011u);
  std::shuffle(order.begin(), order.end(), split_rng);
  // Largest-remainder apportionment; ties go to the earlier split.
  const std::array<double, 3> quota = {cfg.ratios.train * n_sessions, cfg.ratios.val * n_sessions,
                                       cfg.ratios.test * n_sessions};
  std::array<int, 3> count{};
  int assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    count[k] = static_cast<int>(std::floor(quota[k] + 1e-9));
    assigned += count[k];
  }
  std::array<std::size_t, 3> by_remainder = {0, 1, 2};
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t l, std::size_t r) {
    return quota[l] - count[l] > quota[r] - count[r] + 1e-9;
  });
  for (std::size_t k = 0; assigned < n_sessions; k = (k + 1) % 3, ++assigned) ++count[by_remainder[k]];
  const int n_train = count[0];
  const int n_val = count[1];
  std::vector<std::string> split_of(static_cast<std::size_t>(n_sessions));
  for (int i = 0; i < n_sessions; ++i) {
    split_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
        i < n_train ? "train" : (i < n_train + n_val ? "val" : "test");
  }
  for (int s = 0; s < n_sessions; ++s) {
    const std::string& split = split_of[static_cast<std::size_t>(s)];
    auto& dst = split == "train" ? ds.train : (split == "val" ? ds.val : ds.test);
    dst.insert(dst.end(), sessions[static_cast<std::size_t>(s)].begin(),
               sessions[static_cast<std::size_t>(s)].end());
    ds.session_split.emplace_back(s, split);
  }
  const json config = {{"preset", json::parse(cfg.preset.to_json())},
                       {"n_samples", cfg.n_samples},
                       {"samples_per_session", cfg.samples_per_session},
                       {"ratios", {cfg.ratios.train, cfg.ratios.val, cfg.ratios.test}},
                       {"seed", cfg.seed},
                       {"confidence_quantile", cfg.confidence_quantile}};
  ds.config_json = config.dump();
  return ds;
}

Dataset combine_datasets(const Dataset& a, const Dataset& b) {
  Dataset out;
  out.domain = "combined";
  auto every_second = [](const std::vector<DatasetRecord>& x,
                         const std::vector<DatasetRecord>& y) {
    std::vector<DatasetRecord> r;
    for (std::size_t i = 0; i < x.size(); i += 2) r.push_back(x[i]);
    for (std::size_t i = 0; i < y.size(); i += 2) r.push_back(y[i]);
    return r;
  };
  out.train = every_second(a.train, b.train);
  out.val = every_second(a.val, b.val);
  out.test = every_second(a.test, b.test);
  for (std::size_t t = 0; t < out.thresholds.size(); ++t) {
    out.thresholds[t] = std::min(a.thresholds[t], b.thresholds[t]);
  }
  for (const auto& [s, split] : a.session_split) {
    out.session_split.emplace_back(s, a.domain + ":" + split);
  }
  for (const auto& [s, split] : b.session_split) {
    out.session_split.emplace_back(s, b.domain + ":" + split);
  }
  out.config_json = json{{"combined", {json::parse(a.config_json.empty() ? "{}" : a.config_json),
                                       json::parse(b.config_json.empty() ? "{}" : b.config_json)}}}
                        .dump();
  return out;
}

}  // namespace objfusion
