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
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "objfusion/types.hpp"

namespace objfusion {

/// Architecture header of the transformer fusion model. Shared verbatim with
/// the weight file so that a trainer and this inference code agree on every
/// tensor shape.
struct HiloHyperParams {
  int d_model = 64;
  int n_heads = 4;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int ff_dim = 128;
  int n_queries = 20;
  int n_classes = kNumClasses;
  /// Query self-attention inside each decoder block (standard DETR decoder).
  bool decoder_self_attn = true;
  /// Sinusoid frequencies in 1/m: wavelengths 200 m and 25 m.
  std::array<double, 2> pos_freqs{1.0 / 200.0, 1.0 / 25.0};
  /// Ordered raw per-detection fields; see default_input_layout().
  std::vector<std::string> input_feature_layout;
  /// Divisor applied to each raw field, same order as the layout.
  std::vector<double> input_scale;
  /// Box head: x, y are multiplied by output_pos_scale; l, w are
  /// softplus(.) * output_extent_scale.
  double output_pos_scale = 100.0;
  double output_extent_scale = 5.0;

  static HiloHyperParams defaults();

  /// Raw feature count plus the 8 positional-encoding features.
  int input_dim() const;
  int head_dim() const { return d_model / n_heads; }

  /// Throws std::invalid_argument on inconsistent values or unknown layout
  /// fields.
  void validate() const;

  bool operator==(const HiloHyperParams&) const = default;
};

/// [x, y, l, w, vx, vy, sin psi, cos psi, s_e, s_c, class one-hot,
///  sensor one-hot, age].
std::vector<std::string> default_input_layout();
std::vector<double> default_input_scale(const std::vector<std::string>& layout);

struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  std::int64_t numel() const;
  bool operator==(const Tensor&) const = default;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;

  bool operator==(const NamedTensor&) const = default;
};

struct TensorSpec {
  std::string name;
  std::vector<int> shape;
};

/// Every tensor the architecture needs, in canonical (file) order.
std::vector<TensorSpec> tensor_specs(const HiloHyperParams& hp);

/// Ordered tensors. Immutable once handed to HiloModel.
struct HiloWeights {
  std::vector<NamedTensor> tensors;

  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  std::int64_t parameter_count() const;

  /// Zero-initialized tensors for every spec.
  static HiloWeights zeros(const HiloHyperParams& hp);
  /// Uniform(-scale, scale) entries, layer-norm gains set to 1.
  static HiloWeights random(const HiloHyperParams& hp, std::uint64_t seed,
                            double scale = 0.2);

  bool operator==(const HiloWeights&) const = default;
};

/// Throws ShapeError (see weights_io.hpp) if any tensor is missing, extra or
/// misshapen.
void check_shapes(const HiloHyperParams& hp, const HiloWeights& w);

/// One output slot: box [x, y, l, w, psi] and n_classes + 1 logits, the last
/// one being NoObject.
struct FusedEstimate {
  std::array<double, 5> box{};
  std::vector<double> logits;

  int class_index() const;
  double confidence() const;
  bool is_no_object() const;
  ObjectState to_object() const;
};

/// [sin(2 pi f_k x), cos(2 pi f_k x), sin(2 pi f_k y), cos(2 pi f_k y)] for
/// k = 1, 2.
std::array<double, 8> position_encode(double x, double y,
                                      const std::array<double, 2>& freqs);

/// Per-detection raw input rows (before scaling) following the layout; rows
/// are in canonical order, independent of the input permutation.
Eigen::MatrixXd raw_features(const SampleBuffer& buf, const HiloHyperParams& hp);

class HiloModel {
 public:
  HiloModel(HiloHyperParams hp, HiloWeights w);

  const HiloHyperParams& hyper_params() const { return hp_; }
  const HiloWeights& weights() const { return w_; }

  /// Token features (K x d_model) after the input MLP; the single null token
  /// when the sample has no detections.
  Eigen::MatrixXf embed(const SampleBuffer& buf) const;

  /// Exactly n_queries estimates. Throws std::runtime_error naming the layer
  /// if a non-finite value appears.
  std::vector<FusedEstimate> forward(const SampleBuffer& buf) const;

 private:
  using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatMap = Eigen::Map<const RowMat>;
  using VecMap = Eigen::Map<const Eigen::RowVectorXf>;

  MatMap mat(const std::string& name) const;
  VecMap vec(const std::string& name) const;
  Eigen::MatrixXf linear(const Eigen::MatrixXf& x, const std::string& prefix) const;
  Eigen::MatrixXf layer_norm(const Eigen::MatrixXf& x, const std::string& prefix) const;
  Eigen::MatrixXf attention(const Eigen::MatrixXf& q_in, const Eigen::MatrixXf& kv_in,
                            const std::string& prefix) const;
  Eigen::MatrixXf ffn(const Eigen::MatrixXf& x, const std::string& prefix) const;

  const Tensor& tensor(const std::string& name) const;

  HiloHyperParams hp_;
  HiloWeights w_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::vector<FusedEstimate> hilo_forward(const SampleBuffer& buf,
                                        const HiloModel& model);

/// Estimates not classified as NoObject, as objects for evaluation.
GlobalObjectSet to_global_set(const std::vector<FusedEstimate>& estimates);

}  // namespace objfusion
