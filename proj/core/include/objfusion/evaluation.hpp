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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "objfusion/types.hpp"

namespace objfusion {

inline constexpr double kDefaultIouThreshold = 0.5;

struct SampleCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tc = 0;
  long fc = 0;
  /// IoU of every TP pair, in match order.
  std::vector<double> tp_ious;
  /// (estimate index, annotation index) of every TP.
  std::vector<std::pair<int, int>> pairs;
};

/// Greedy one-to-one matching in descending IoU (ties: lower estimate
/// index, then lower annotation index). Pairs at or above the threshold are
/// TP (TC when classes agree, FC otherwise); leftovers are FP / FN.
SampleCounts match_sample(const std::vector<ObjectState>& estimates,
                          const std::vector<ObjectState>& annotations,
                          double iou_threshold = kDefaultIouThreshold);

struct EvalAccumulator {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tc = 0;
  long fc = 0;
  double iou_sum = 0.0;

  void add(const SampleCounts& c);
  void merge(const EvalAccumulator& other);
};

struct MetricReport {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double class_precision = 0.0;
  double miou = 0.0;
  /// Set when a metric's denominator was empty and it was reported as 0.
  bool f1_undefined = false;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool class_precision_undefined = false;
  bool miou_undefined = false;

  /// F1 + mIoU, the tuning objective of the Kalman path.
  double objective() const { return f1 + miou; }
  std::string to_json(int indent = 2) const;
};

MetricReport compute_metrics(const EvalAccumulator& acc);

/// Matches every sample (parallel over `jobs`) and accumulates.
EvalAccumulator evaluate(const std::vector<std::vector<ObjectState>>& estimates,
                         const std::vector<std::vector<ObjectState>>& annotations,
                         int jobs = 1,
                         double iou_threshold = kDefaultIouThreshold);

struct MatrixCell {
  std::string method;
  std::string source;
  std::string target;
  std::optional<MetricReport> report;  // empty when the artifact is missing
};

/// Runs `run(method, source, target)` for every combination; a nullopt
/// result marks a missing artifact rather than a failure.
using CellRunner = std::function<std::optional<MetricReport>(
    const std::string& method, const std::string& source, const std::string& target)>;

std::vector<MatrixCell> cross_domain_matrix(const std::vector<std::string>& methods,
                                            const std::vector<std::string>& sources,
                                            const std::vector<std::string>& targets,
                                            const CellRunner& run);

/// method,source,target,f1,precision,recall,class_precision,miou; missing
/// cells leave the metric fields empty. `provenance` lines are emitted as
/// leading '#' comments.
std::string matrix_to_csv(const std::vector<MatrixCell>& cells,
                          const std::vector<std::string>& provenance = {});

/// Per target and metric: best value in **bold**, second best _underlined_.
std::string matrix_summary(const std::vector<MatrixCell>& cells);

}  // namespace objfusion
