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
#include "objfusion/hilo_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "objfusion/geometry.hpp"
#include "objfusion/weights_io.hpp"

namespace objfusion {
namespace {

constexpr float kLayerNormEps = 1e-5f;
constexpr int kBoxOutputs = 6;  // x, y, l, w, sin psi, cos psi

std::string class_field(int c) {
  return "cls_" + std::string(to_string(static_cast<ObjectClass>(c)));
}

std::string sensor_field(int s) {
  return "sensor_" + std::string(to_string(static_cast<SensorId>(s)));
}

double field_value(const std::string& field, const TrackedObject& o,
                   SensorId sensor, double age) {
  const ObjectState& s = o.state;
  if (field == "x") return s.x;
  if (field == "y") return s.y;
  if (field == "l") return s.l;
  if (field == "w") return s.w;
  if (field == "vx") return s.vx;
  if (field == "vy") return s.vy;
  if (field == "sin_psi") return std::sin(s.psi);
  if (field == "cos_psi") return std::cos(s.psi);
  if (field == "s_e") return s.s_e;
  if (field == "s_c") return s.s_c;
  if (field == "age") return age;
  for (int c = 0; c < kNumClasses; ++c) {
    if (field == class_field(c)) return static_cast<int>(s.cls) == c ? 1.0 : 0.0;
  }
  for (int i = 0; i < kNumSensors; ++i) {
    if (field == sensor_field(i)) return static_cast<int>(sensor) == i ? 1.0 : 0.0;
  }
  throw std::invalid_argument("unknown input feature: " + field);
}

double softplus(double v) { return v > 20.0 ? v : std::log1p(std::exp(v)); }

void check_finite(const Eigen::MatrixXf& m, const std::string& where) {
  if (!m.allFinite()) {
    throw std::runtime_error("hilo_forward: non-finite values after " + where);
  }
}

void append_linear(std::vector<TensorSpec>& out, const std::string& prefix,
                   int out_dim, int in_dim) {
  out.push_back({prefix + ".weight", {out_dim, in_dim}});
  out.push_back({prefix + ".bias", {out_dim}});
}

void append_norm(std::vector<TensorSpec>& out, const std::string& prefix, int d) {
  out.push_back({prefix + ".weight", {d}});
  out.push_back({prefix + ".bias", {d}});
}

void append_attention(std::vector<TensorSpec>& out, const std::string& prefix,
                      int d) {
  for (const char* p : {"q_proj", "k_proj", "v_proj", "out_proj"}) {
    append_linear(out, prefix + "." + p, d, d);
  }
}

}  // namespace

HiloHyperParams HiloHyperParams::defaults() {
  HiloHyperParams hp;
  hp.input_feature_layout = default_input_layout();
  hp.input_scale = default_input_scale(hp.input_feature_layout);
  return hp;
}

int HiloHyperParams::input_dim() const {
  return static_cast<int>(input_feature_layout.size()) + 8;
}

void HiloHyperParams::validate() const {
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0) {
    throw std::invalid_argument("HiloHyperParams: d_model must be a positive multiple of n_heads");
  }
  if (n_enc_layers < 0 || n_dec_layers < 1 || ff_dim <= 0 || n_queries <= 0) {
    throw std::invalid_argument("HiloHyperParams: invalid layer counts");
  }
  if (n_classes != kNumClasses) {
    throw std::invalid_argument("HiloHyperParams: n_classes must equal the class set size");
  }
  if (input_feature_layout.empty() ||
      input_feature_layout.size() != input_scale.size()) {
    throw std::invalid_argument("HiloHyperParams: layout and scale sizes differ");
  }
  std::set<std::string> seen;
  const auto known = default_input_layout();
  for (const auto& f : input_feature_layout) {
    if (std::find(known.begin(), known.end(), f) == known.end()) {
      throw std::invalid_argument("HiloHyperParams: unknown input feature " + f);
    }
    if (!seen.insert(f).second) {
      throw std::invalid_argument("HiloHyperParams: duplicate input feature " + f);
    }
  }
  for (double s : input_scale) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("HiloHyperParams: input scales must be positive");
    }
  }
}

std::vector<std::string> default_input_layout() {
  std::vector<std::string> f = {"x",       "y",       "l",   "w",  "vx",
                                "vy",      "sin_psi", "cos_psi", "s_e", "s_c"};
  for (int c = 0; c < kNumClasses; ++c) f.push_back(class_field(c));
  for (int s = 0; s < kNumSensors; ++s) f.push_back(sensor_field(s));
  f.push_back("age");
  return f;
}

std::vector<double> default_input_scale(const std::vector<std::string>& layout) {
  std::vector<double> scale;
  for (const auto& f : layout) {
    if (f == "x" || f == "y") {
      scale.push_back(100.0);
    } else if (f == "l" || f == "w") {
      scale.push_back(10.0);
    } else if (f == "vx" || f == "vy") {
      scale.push_back(30.0);
    } else if (f == "age") {
      scale.push_back(0.1);
    } else {
      scale.push_back(1.0);
    }
  }
  return scale;
}

std::int64_t Tensor::numel() const {
  std::int64_t n = 1;
  for (int s : shape) n *= s;
  return n;
}

std::vector<TensorSpec> tensor_specs(const HiloHyperParams& hp) {
  const int d = hp.d_model;
  std::vector<TensorSpec> out;
  append_linear(out, "input_mlp.0", d, hp.input_dim());
  append_linear(out, "input_mlp.2", d, d);
  out.push_back({"null_token", {1, d}});
  for (int i = 0; i < hp.n_enc_layers; ++i) {
    const std::string p = "encoder." + std::to_string(i);
    append_norm(out, p + ".norm1", d);
    append_attention(out, p + ".self_attn", d);
    append_norm(out, p + ".norm2", d);
    append_linear(out, p + ".ffn.0", hp.ff_dim, d);
    append_linear(out, p + ".ffn.2", d, hp.ff_dim);
  }
  append_norm(out, "encoder.norm", d);
  out.push_back({"queries", {hp.n_queries, d}});
  for (int i = 0; i < hp.n_dec_layers; ++i) {
    const std::string p = "decoder." + std::to_string(i);
    if (hp.decoder_self_attn) {
      append_norm(out, p + ".norm1", d);
      append_attention(out, p + ".self_attn", d);
    }
    append_norm(out, p + ".norm2", d);
    append_attention(out, p + ".cross_attn", d);
    append_norm(out, p + ".norm3", d);
    append_linear(out, p + ".ffn.0", hp.ff_dim, d);
    append_linear(out, p + ".ffn.2", d, hp.ff_dim);
  }
  append_norm(out, "decoder.norm", d);
  append_linear(out, "box_head.0", d, d);
  append_linear(out, "box_head.2", kBoxOutputs, d);
  append_linear(out, "class_head", hp.n_classes + 1, d);
  return out;
}

const Tensor& HiloWeights::at(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.tensor;
  }
  throw ShapeError("missing tensor: " + name);
}

Tensor& HiloWeights::at(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::int64_t HiloWeights::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : tensors) n += t.tensor.numel();
  return n;
}

HiloWeights HiloWeights::zeros(const HiloHyperParams& hp) {
  HiloWeights w;
  for (const auto& spec : tensor_specs(hp)) {
    Tensor t;
    t.shape = spec.shape;
    t.data.assign(static_cast<std::size_t>(t.numel()), 0.0f);
    w.tensors.push_back({spec.name, std::move(t)});
  }
  return w;
}

HiloWeights HiloWeights::random(const HiloHyperParams& hp, std::uint64_t seed,
                                double scale) {
  HiloWeights w = zeros(hp);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& nt : w.tensors) {
    const bool norm_gain = nt.name.find("norm") != std::string::npos &&
                           nt.name.ends_with(".weight");
    for (auto& v : nt.tensor.data) {
      v = static_cast<float>(norm_gain ? 1.0 + u(rng) : u(rng));
    }
  }
  return w;
}

void check_shapes(const HiloHyperParams& hp, const HiloWeights& w) {
  const auto specs = tensor_specs(hp);
  if (specs.size() != w.tensors.size()) {
    throw ShapeError("expected " + std::to_string(specs.size()) +
                     " tensors, found " + std::to_string(w.tensors.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& nt = w.tensors[i];
    if (nt.name != specs[i].name) {
      throw ShapeError("tensor " + std::to_string(i) + " is " + nt.name +
                       ", expected " + specs[i].name);
    }
    if (nt.tensor.shape != specs[i].shape) {
      throw ShapeError("shape mismatch for " + nt.name);
    }
    if (static_cast<std::int64_t>(nt.tensor.data.size()) != nt.tensor.numel()) {
      throw ShapeError("payload size mismatch for " + nt.name);
    }
  }
}

int FusedEstimate::class_index() const {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

double FusedEstimate::confidence() const {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return 1.0 / z;
}

bool FusedEstimate::is_no_object() const {
  return class_index() == static_cast<int>(logits.size()) - 1;
}

ObjectState FusedEstimate::to_object() const {
  ObjectState o;
  o.x = box[0];
  o.y = box[1];
  // softplus can underflow to zero for extreme logits
  o.l = std::max(box[2], 1e-6);
  o.w = std::max(box[3], 1e-6);
  o.psi = wrap_angle(box[4]);
  const int c = class_index();
  o.cls = c < kNumClasses ? static_cast<ObjectClass>(c) : ObjectClass::kCar;
  o.s_e = confidence();
  o.s_c = confidence();
  return o;
}

std::array<double, 8> position_encode(double x, double y,
                                      const std::array<double, 2>& freqs) {
  std::array<double, 8> e{};
  for (int k = 0; k < 2; ++k) {
    const double ax = kTwoPi * freqs[k] * x;
    const double ay = kTwoPi * freqs[k] * y;
    e[4 * k + 0] = std::sin(ax);
    e[4 * k + 1] = std::cos(ax);
    e[4 * k + 2] = std::sin(ay);
    e[4 * k + 3] = std::cos(ay);
  }
  return e;
}

Eigen::MatrixXd raw_features(const SampleBuffer& buf, const HiloHyperParams& hp) {
  const auto& layout = hp.input_feature_layout;
  const int f = static_cast<int>(layout.size());
  std::vector<std::vector<double>> rows;
  rows.reserve(buf.detection_count());
  for (const auto& frame : buf.frames) {
    const double age = buf.annotation_time - frame.arrival_time;
    for (const auto& o : frame.objects) {
      std::vector<double> r(static_cast<std::size_t>(f));
      for (int i = 0; i < f; ++i) {
        r[static_cast<std::size_t>(i)] = field_value(layout[i], o, frame.sensor, age);
      }
      // Positional encoding always uses the object position.
      const auto pe = position_encode(o.state.x, o.state.y, hp.pos_freqs);
      r.insert(r.end(), pe.begin(), pe.end());
      rows.push_back(std::move(r));
    }
  }
  // Canonical order makes every reduction over tokens independent of the
  // input permutation, bit for bit.
  std::sort(rows.begin(), rows.end());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), f + 8);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < f + 8; ++c) {
      out(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return out;
}

HiloModel::HiloModel(HiloHyperParams hp, HiloWeights w)
    : hp_(std::move(hp)), w_(std::move(w)) {
  hp_.validate();
  check_shapes(hp_, w_);
  for (std::size_t i = 0; i < w_.tensors.size(); ++i) {
    index_.emplace(w_.tensors[i].name, i);
  }
}

const Tensor& HiloModel::tensor(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) {
    throw ShapeError("missing tensor: " + name);
  }
  return w_.tensors[it->second].tensor;
}

HiloModel::MatMap HiloModel::mat(const std::string& name) const {
  const Tensor& t = tensor(name);
  const int rows = t.shape.size() == 2 ? t.shape[0] : 1;
  const int cols = t.shape.size() == 2 ? t.shape[1] : t.shape[0];
  return MatMap(t.data.data(), rows, cols);
}

HiloModel::VecMap HiloModel::vec(const std::string& name) const {
  const Tensor& t = tensor(name);
  return VecMap(t.data.data(), static_cast<Eigen::Index>(t.data.size()));
}

Eigen::MatrixXf HiloModel::linear(const Eigen::MatrixXf& x,
                                  const std::string& prefix) const {
  Eigen::MatrixXf y = x * mat(prefix + ".weight").transpose();
  y.rowwise() += vec(prefix + ".bias");
  return y;
}

Eigen::MatrixXf HiloModel::layer_norm(const Eigen::MatrixXf& x,
                                      const std::string& prefix) const {
  const auto gain = vec(prefix + ".weight");
  const auto bias = vec(prefix + ".bias");
  Eigen::MatrixXf y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const float mean = x.row(r).mean();
    const Eigen::RowVectorXf centered = x.row(r).array() - mean;
    const float var = centered.squaredNorm() / static_cast<float>(x.cols());
    y.row(r) = (centered / std::sqrt(var + kLayerNormEps)).cwiseProduct(gain) + bias;
  }
  return y;
}

Eigen::MatrixXf HiloModel::attention(const Eigen::MatrixXf& q_in,
                                     const Eigen::MatrixXf& kv_in,
                                     const std::string& prefix) const {
  const Eigen::MatrixXf q = linear(q_in, prefix + ".q_proj");
  const Eigen::MatrixXf k = linear(kv_in, prefix + ".k_proj");
  const Eigen::MatrixXf v = linear(kv_in, prefix + ".v_proj");
  const int dh = hp_.head_dim();
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
  Eigen::MatrixXf heads(q.rows(), hp_.d_model);
  for (int h = 0; h < hp_.n_heads; ++h) {
    Eigen::MatrixXf scores =
        (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      const float mx = scores.row(r).maxCoeff();
      scores.row(r) = (scores.row(r).array() - mx).exp();
      scores.row(r) /= scores.row(r).sum();
    }
    heads.middleCols(h * dh, dh) = scores * v.middleCols(h * dh, dh);
  }
  return linear(heads, prefix + ".out_proj");
}

Eigen::MatrixXf HiloModel::ffn(const Eigen::MatrixXf& x,
                               const std::string& prefix) const {
  const Eigen::MatrixXf hidden = linear(x, prefix + ".0").cwiseMax(0.0f);
  return linear(hidden, prefix + ".2");
}

Eigen::MatrixXf HiloModel::embed(const SampleBuffer& buf) const {
  const Eigen::MatrixXd raw = raw_features(buf, hp_);
  if (raw.rows() == 0) {
    return mat("null_token");
  }
  const int f = static_cast<int>(hp_.input_feature_layout.size());
  Eigen::MatrixXf in = raw.cast<float>();
  for (int c = 0; c < f; ++c) {
    in.col(c) = (raw.col(c) / hp_.input_scale[static_cast<std::size_t>(c)]).cast<float>();
  }
  const Eigen::MatrixXf hidden = linear(in, "input_mlp.0").cwiseMax(0.0f);
  return linear(hidden, "input_mlp.2");
}

std::vector<FusedEstimate> HiloModel::forward(const SampleBuffer& buf) const {
  Eigen::MatrixXf x = embed(buf);
  check_finite(x, "input_mlp");
  for (int i = 0; i < hp_.n_enc_layers; ++i) {
    const std::string p = "encoder." + std::to_string(i);
    const Eigen::MatrixXf n1 = layer_norm(x, p + ".norm1");
    x += attention(n1, n1, p + ".self_attn");
    check_finite(x, p + ".self_attn");
    x += ffn(layer_norm(x, p + ".norm2"), p + ".ffn");
    check_finite(x, p + ".ffn");
  }
  const Eigen::MatrixXf memory = layer_norm(x, "encoder.norm");
  check_finite(memory, "encoder.norm");

  Eigen::MatrixXf t = mat("queries");
  for (int i = 0; i < hp_.n_dec_layers; ++i) {
    const std::string p = "decoder." + std::to_string(i);
    if (hp_.decoder_self_attn) {
      const Eigen::MatrixXf n1 = layer_norm(t, p + ".norm1");
      t += attention(n1, n1, p + ".self_attn");
      check_finite(t, p + ".self_attn");
    }
    t += attention(layer_norm(t, p + ".norm2"), memory, p + ".cross_attn");
    check_finite(t, p + ".cross_attn");
    t += ffn(layer_norm(t, p + ".norm3"), p + ".ffn");
    check_finite(t, p + ".ffn");
  }
  const Eigen::MatrixXf fused = layer_norm(t, "decoder.norm");
  check_finite(fused, "decoder.norm");

  const Eigen::MatrixXf box =
      linear(linear(fused, "box_head.0").cwiseMax(0.0f), "box_head.2");
  check_finite(box, "box_head");
  const Eigen::MatrixXf logits = linear(fused, "class_head");
  check_finite(logits, "class_head");

  std::vector<FusedEstimate> out(static_cast<std::size_t>(hp_.n_queries));
  for (int n = 0; n < hp_.n_queries; ++n) {
    FusedEstimate& e = out[static_cast<std::size_t>(n)];
    e.box[0] = box(n, 0) * hp_.output_pos_scale;
    e.box[1] = box(n, 1) * hp_.output_pos_scale;
    e.box[2] = softplus(box(n, 2)) * hp_.output_extent_scale;
    e.box[3] = softplus(box(n, 3)) * hp_.output_extent_scale;
    e.box[4] = std::atan2(static_cast<double>(box(n, 4)),
                          static_cast<double>(box(n, 5)));
    e.logits.resize(static_cast<std::size_t>(logits.cols()));
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      e.logits[static_cast<std::size_t>(c)] = logits(n, c);
    }
  }
  return out;
}

std::vector<FusedEstimate> hilo_forward(const SampleBuffer& buf,
                                        const HiloModel& model) {
  return model.forward(buf);
}

GlobalObjectSet to_global_set(const std::vector<FusedEstimate>& estimates) {
  GlobalObjectSet out;
  for (const auto& e : estimates) {
    if (e.is_no_object()) continue;
    TrackedObject o;
    o.state = e.to_object();
    out.push_back(o);
  }
  return out;
}

}  // namespace objfusion
