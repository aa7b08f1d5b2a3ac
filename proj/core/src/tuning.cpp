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
#include "objfusion/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "objfusion/parallel.hpp"

namespace objfusion {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::pair<double, double>, kStateDim> kQRange = {{
    {1e-3, 1.0}, {1e-3, 1.0}, {1e-4, 0.1}, {1e-4, 0.1}, {1e-2, 5.0}, {1e-2, 5.0}, {1e-4, 0.1}}};
constexpr std::array<std::pair<double, double>, kStateDim> kExtraRange = {{
    {1e-2, 10.0}, {1e-2, 10.0}, {1e-3, 2.0}, {1e-3, 2.0}, {1e-2, 10.0}, {1e-2, 10.0}, {1e-4, 0.1}}};

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Rng candidate_rng(std::uint64_t seed, int stream, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

PipelineConfig perturb_base(const PipelineConfig& best, std::uint64_t seed, int index) {
  Rng rng = candidate_rng(seed, 2, index);
  PipelineConfig c = best;
  auto jitter = [&](double v, double lo, double hi) {
    return std::clamp(v * std::exp(uniform(rng, -0.7, 0.7)), lo, hi);
  };
  c.alpha = jitter(c.alpha, 1e-5, 0.5);
  c.epsilon = jitter(c.epsilon, 1e-4, 0.5);
  for (int d = 0; d < kStateDim; ++d) {
    c.q_diag[d] = jitter(c.q_diag[d], kQRange[d].first * 0.1, kQRange[d].second * 10.0);
  }
  for (auto& t : c.existence_thresholds) {
    t = std::clamp(t + uniform(rng, -0.1, 0.1), 0.0, 0.9);
  }
  c.output_conf_threshold = std::clamp(c.output_conf_threshold + uniform(rng, -0.1, 0.1), 0.0, 0.99);
  c.kappa = std::clamp(c.kappa + uniform(rng, -0.5, 0.5), 0.0, 5.0);
  return c;
}

PipelineConfig sample_extra(const PipelineConfig& best, std::uint64_t seed, int index) {
  Rng rng = candidate_rng(seed, 3, index);
  PipelineConfig c = best;
  for (auto& extra : c.extra_meas_cov) {
    if (uniform(rng, 0.0, 1.0) < 0.25) {
      extra = DiagCovariance::zero();
      continue;
    }
    for (int d = 0; d < kStateDim; ++d) {
      extra[d] = log_uniform(rng, kExtraRange[d].first, kExtraRange[d].second);
    }
  }
  return c;
}

}  // namespace

TimingStats TimingStats::from(std::vector<double> samples_ms) {
  TimingStats t;
  t.per_sample_ms = samples_ms;
  if (samples_ms.empty()) return t;
  double sum = 0.0;
  for (double v : samples_ms) sum += v;
  t.mean_ms = sum / static_cast<double>(samples_ms.size());
  t.median_ms = empirical_quantile(samples_ms, 0.5);
  t.p99_ms = empirical_quantile(std::move(samples_ms), 0.99);
  return t;
}

std::vector<std::vector<ObjectState>> run_akf(const std::vector<DatasetRecord>& records,
                                              const PipelineConfig& cfg, int jobs,
                                              TimingStats* timing) {
  const AkfFuser fuser(cfg);
  std::vector<std::vector<ObjectState>> out(records.size());
  std::vector<double> ms(records.size(), 0.0);
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    const SampleBuffer buf = records[i].buffer();
    const auto t0 = Clock::now();
    const GlobalObjectSet fused = fuser(buf);
    ms[i] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    out[i].reserve(fused.size());
    for (const auto& g : fused) out[i].push_back(g.state);
  });
  if (timing != nullptr) *timing = TimingStats::from(std::move(ms));
  return out;
}

std::vector<std::vector<ObjectState>> run_hilo(const std::vector<DatasetRecord>& records,
                                               const HiloModel& model, int jobs,
                                               TimingStats* timing) {
  std::vector<std::vector<ObjectState>> out(records.size());
  std::vector<double> ms(records.size(), 0.0);
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    const SampleBuffer buf = records[i].buffer();
    const auto t0 = Clock::now();
    const auto estimates = hilo_forward(buf, model);
    ms[i] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    for (const auto& g : to_global_set(estimates)) out[i].push_back(g.state);
  });
  if (timing != nullptr) *timing = TimingStats::from(std::move(ms));
  return out;
}

MetricReport evaluate_records(const std::vector<std::vector<ObjectState>>& fused,
                              const std::vector<DatasetRecord>& records, int jobs) {
  std::vector<std::vector<ObjectState>> annotations;
  annotations.reserve(records.size());
  for (const auto& r : records) annotations.push_back(r.annotations);
  return compute_metrics(evaluate(fused, annotations, jobs));
}

PipelineConfig sample_pipeline_config(std::uint64_t seed, int index,
                                      const PipelineConfig& base) {
  Rng rng = candidate_rng(seed, 1, index);
  PipelineConfig c = base;
  c.alpha = log_uniform(rng, 1e-4, 0.2);
  c.epsilon = log_uniform(rng, 1e-3, 0.1);
  for (int d = 0; d < kStateDim; ++d) {
    c.q_diag[d] = log_uniform(rng, kQRange[d].first, kQRange[d].second);
  }
  for (auto& t : c.existence_thresholds) t = uniform(rng, 0.0, 0.6);
  c.output_conf_threshold = uniform(rng, 0.0, 0.95);
  c.kappa = uniform(rng, 0.5, 3.0);
  return c;
}

TuneResult tune_pipeline(const std::vector<DatasetRecord>& val, const TuneOptions& opt,
                         const PipelineConfig& base) {
  base.validate();
  TuneResult result;
  int iteration = 0;
  bool have_best = false;
  auto consider = [&](const PipelineConfig& cfg, const std::string& stage) {
    const MetricReport r = evaluate_records(run_akf(val, cfg, opt.jobs), val, opt.jobs);
    result.log.push_back({iteration++, stage, r.objective(), r, cfg});
    if (!have_best || r.objective() > result.best_report.objective()) {
      result.best = cfg;
      result.best_report = r;
      have_best = true;
    }
  };

  PipelineConfig start = base;
  if (!opt.akfa) start.extra_meas_cov = {};
  for (int i = 0; i < std::max(opt.budget, 1); ++i) {
    consider(i == 0 ? start : sample_pipeline_config(opt.seed, i, start), "global");
  }
  for (int i = 0; i < opt.refine_budget; ++i) {
    consider(perturb_base(result.best, opt.seed, i), "refine");
  }
  if (opt.akfa) {
    // Same trajectory as AKF so far; the extra covariance search can only
    // improve on the AKF optimum.
    for (int i = 0; i < opt.refine_budget; ++i) {
      consider(sample_extra(result.best, opt.seed, i), "extra_cov");
    }
  }
  return result;
}

}  // namespace objfusion
