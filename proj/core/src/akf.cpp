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
#include "objfusion/akf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "objfusion/chi2.hpp"
#include "objfusion/geometry.hpp"

namespace objfusion {
namespace {

void rotate_variances(double& pxx, double& pyy, double c, double s) {
  const double xx = c * c * pxx + s * s * pyy;
  const double yy = s * s * pxx + c * c * pyy;
  pxx = xx;
  pyy = yy;
}

TrackedObject with_extra(const TrackedObject& meas,
                         const DiagCovariance& extra) {
  TrackedObject out = meas;
  for (int d = 0; d < kStateDim; ++d) {
    out.cov[d] += extra[d];
  }
  return out;
}

}  // namespace

TrackedObject ego_compensate(const TrackedObject& obj, const EgoMotion& ego,
                             double dt) {
  if (dt < 0.0) {
    throw std::invalid_argument("ego_compensate: dt must be non-negative");
  }
  if (dt == 0.0) {
    return obj;
  }
  const double theta = -ego.yaw_rate * dt;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  TrackedObject out = obj;
  ObjectState& o = out.state;
  const ObjectState& i = obj.state;
  o.x = c * i.x - s * i.y - ego.speed * dt;
  o.y = s * i.x + c * i.y;
  o.vx = c * i.vx - s * i.vy;
  o.vy = s * i.vx + c * i.vy;
  o.psi = wrap_angle(i.psi + theta);
  rotate_variances(out.cov[kX], out.cov[kY], c, s);
  rotate_variances(out.cov[kVx], out.cov[kVy], c, s);
  return out;
}

ObjectState cv_backtrack(const ObjectState& state_at_t, const EgoMotion& ego,
                         double dt) {
  if (dt < 0.0) {
    throw std::invalid_argument("cv_backtrack: dt must be non-negative");
  }
  if (dt == 0.0) {
    return state_at_t;
  }
  ObjectState o = state_at_t;
  // Undo the CV step, then the frame change.
  const double px = o.x - o.vx * dt + ego.speed * dt;
  const double py = o.y - o.vy * dt;
  const double theta = ego.yaw_rate * dt;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  o.x = c * px - s * py;
  o.y = s * px + c * py;
  const double vx = o.vx;
  const double vy = o.vy;
  o.vx = c * vx - s * vy;
  o.vy = s * vx + c * vy;
  o.psi = wrap_angle(o.psi + theta);
  return o;
}

TrackedObject cv_predict(const TrackedObject& obj, double dt,
                         const DiagCovariance& q_diag) {
  if (dt < 0.0) {
    throw std::invalid_argument("cv_predict: dt must be non-negative");
  }
  TrackedObject out = obj;
  out.state.x += obj.state.vx * dt;
  out.state.y += obj.state.vy * dt;
  out.cov[kX] += dt * dt * obj.cov[kVx];
  out.cov[kY] += dt * dt * obj.cov[kVy];
  for (int d = 0; d < kStateDim; ++d) {
    out.cov[d] += q_diag[d] * dt;
  }
  return out;
}

double mahalanobis_sq(const TrackedObject& pred, const TrackedObject& meas,
                      const std::vector<StateIndex>& dims) {
  if (dims.empty()) {
    throw std::invalid_argument("mahalanobis_sq: no dimensions selected");
  }
  const StateVector a = pred.state.kinematics();
  const StateVector b = meas.state.kinematics();
  double d2 = 0.0;
  for (StateIndex d : dims) {
    double r = b[d] - a[d];
    if (d == kPsi) {
      r = wrap_angle(r);
    }
    const double s = pred.cov[d] + meas.cov[d];
    if (!(s > 0.0)) {
      throw std::domain_error("mahalanobis_sq: zero combined variance on " +
                              std::string(to_string(d)));
    }
    d2 += r * r / s;
  }
  return d2;
}

Assignment associate(const SensorFrame& frame, const GlobalObjectSet& globals,
                     const PipelineConfig& cfg) {
  const auto k = static_cast<Eigen::Index>(frame.objects.size());
  const auto n = static_cast<Eigen::Index>(globals.size());
  const DiagCovariance& extra =
      cfg.extra_meas_cov[static_cast<std::size_t>(sensor_type(frame.sensor))];
  CostMatrix cost(k, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    const TrackedObject meas = with_extra(frame.objects[r], extra);
    const Aabb meas_box =
        inflate_box(Aabb::from(meas.state), meas.cov, cfg.kappa);
    for (Eigen::Index c = 0; c < n; ++c) {
      const TrackedObject& g = globals[c];
      const Aabb g_box = inflate_box(Aabb::from(g.state), g.cov, cfg.kappa);
      cost(r, c) = overlaps(meas_box, g_box)
                       ? mahalanobis_sq(g, meas, cfg.assoc_dims)
                       : kForbiddenCost;
    }
  }
  const double gate =
      chi2_ppf(1.0 - cfg.alpha, static_cast<int>(cfg.assoc_dims.size()));
  return with_existing(auction_assign(augment_for_birth(cost, gate), cfg.epsilon),
                       static_cast<int>(n));
}

TrackedObject akf_update(const TrackedObject& global, const TrackedObject& meas,
                         const DiagCovariance& extra) {
  const StateVector x = global.state.kinematics();
  const StateVector z = meas.state.kinematics();
  StateVector fused{};
  TrackedObject out = global;
  for (int d = 0; d < kStateDim; ++d) {
    const double s = global.cov[d] + meas.cov[d] + extra[d];
    if (!(s > 0.0)) {
      throw std::domain_error("akf_update: zero innovation variance on " +
                              std::string(to_string(static_cast<StateIndex>(d))));
    }
    const double gain = global.cov[d] / s;
    double innovation = z[d] - x[d];
    if (d == kPsi) {
      innovation = wrap_angle(innovation);
    }
    fused[d] = x[d] + gain * innovation;
    out.cov[d] = (1.0 - gain) * global.cov[d];
  }
  fused[kPsi] = wrap_angle(fused[kPsi]);
  out.state.set_kinematics(fused);
  if (meas.state.s_c > global.state.s_c) {
    out.state.cls = meas.state.cls;
  }
  out.state.s_c = std::max(global.state.s_c, meas.state.s_c);
  out.state.s_e = 1.0 - (1.0 - global.state.s_e) * (1.0 - meas.state.s_e);
  return out;
}

SampleBuffer filter_by_existence(const SampleBuffer& buf,
                                 const PipelineConfig& cfg) {
  SampleBuffer out = buf;
  for (auto& frame : out.frames) {
    const double threshold =
        cfg.existence_thresholds[static_cast<std::size_t>(frame.sensor)];
    std::erase_if(frame.objects, [threshold](const TrackedObject& o) {
      return o.state.s_e < threshold;
    });
  }
  return out;
}

GlobalObjectSet fuse_sample(const SampleBuffer& buf, const PipelineConfig& cfg) {
  GlobalObjectSet globals;
  if (buf.frames.empty()) {
    return globals;
  }
  std::vector<std::size_t> order(buf.frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const SensorFrame& fa = buf.frames[a];
    const SensorFrame& fb = buf.frames[b];
    if (fa.arrival_time != fb.arrival_time) {
      return fa.arrival_time < fb.arrival_time;
    }
    return static_cast<int>(fa.sensor) < static_cast<int>(fb.sensor);
  });
  for (const auto& f : buf.frames) {
    if (f.arrival_time > buf.annotation_time) {
      throw std::invalid_argument(
          "fuse_sample: frame arrives after the annotation time");
    }
  }

  auto advance = [&](double dt) {
    for (auto& g : globals) {
      if (cfg.ego_compensation) {
        g = ego_compensate(g, buf.ego, dt);
      }
      g = cv_predict(g, dt, cfg.q_diag);
    }
  };

  const SensorFrame& first = buf.frames[order.front()];
  globals = first.objects;
  double now = first.arrival_time;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const SensorFrame& frame = buf.frames[order[i]];
    advance(frame.arrival_time - now);
    now = frame.arrival_time;
    if (frame.objects.empty()) {
      continue;
    }
    const Assignment a = associate(frame, globals, cfg);
    const DiagCovariance& extra =
        cfg.extra_meas_cov[static_cast<std::size_t>(sensor_type(frame.sensor))];
    std::vector<TrackedObject> births;
    for (std::size_t k = 0; k < frame.objects.size(); ++k) {
      if (a.is_birth(static_cast<int>(k))) {
        births.push_back(frame.objects[k]);
      } else {
        auto& g = globals[static_cast<std::size_t>(a.col[k])];
        g = akf_update(g, frame.objects[k], extra);
      }
    }
    globals.insert(globals.end(), births.begin(), births.end());
  }
  advance(buf.annotation_time - now);
  std::erase_if(globals, [&](const TrackedObject& g) {
    return g.state.s_e < cfg.output_conf_threshold;
  });
  return globals;
}

AkfFuser::AkfFuser(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

GlobalObjectSet AkfFuser::operator()(const SampleBuffer& buf) const {
  return fuse_sample(filter_by_existence(buf, cfg_), cfg_);
}

}  // namespace objfusion
