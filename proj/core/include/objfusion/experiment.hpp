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

#include <cstdint>
#include <string>
#include <vector>

#include "objfusion/akf.hpp"
#include "objfusion/evaluation.hpp"
#include "objfusion/hilo_model.hpp"
#include "objfusion/scenario.hpp"

namespace objfusion {

struct TimingStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  std::vector<double> per_sample_ms;

  static TimingStats from(std::vector<double> samples_ms);
};

/// Fused objects per record, in record order. Timing wraps only the fusion
/// call of each sample.
std::vector<std::vector<ObjectState>> run_akf(const std::vector<DatasetRecord>& records,
                                              const PipelineConfig& cfg, int jobs = 1,
                                              TimingStats* timing = nullptr);

std::vector<std::vector<ObjectState>> run_hilo(const std::vector<DatasetRecord>& records,
                                               const HiloModel& model, int jobs = 1,
                                               TimingStats* timing = nullptr);

MetricReport evaluate_records(const std::vector<std::vector<ObjectState>>& fused,
                              const std::vector<DatasetRecord>& records, int jobs = 1);

struct TuneOptions {
  /// Global random candidates shared by AKF and AKFA.
  int budget = 40;
  /// Follow-up candidates perturbing the best base parameters. AKFA then
  /// spends the same count again on extra measurement covariances for the
  /// best base, so its search starts from the AKF optimum.
  int refine_budget = 20;
  bool akfa = false;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct TuneLogEntry {
  int iteration = 0;
  std::string stage;
  double objective = 0.0;
  MetricReport report;
  PipelineConfig config;
};

struct TuneResult {
  PipelineConfig best;
  MetricReport best_report;
  std::vector<TuneLogEntry> log;
};

/// Random search maximizing F1 + mIoU on the validation records. The first
/// candidate is `base` itself; with budget 1 the result is that candidate.
TuneResult tune_pipeline(const std::vector<DatasetRecord>& val,
                         const TuneOptions& opt,
                         const PipelineConfig& base = PipelineConfig{});

/// One global-search draw.
PipelineConfig sample_pipeline_config(std::uint64_t seed, int index,
                                      const PipelineConfig& base);

}  // namespace objfusion
