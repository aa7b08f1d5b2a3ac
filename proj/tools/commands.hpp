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

#include <optional>
#include <stdexcept>
#include <string>

namespace objfusion::cli {

/// Bad flag combination detected after parsing; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HILO_JOBS, when set, overrides the --jobs flag.
int resolve_jobs(int flag_value);

struct SimulateArgs {
  std::string preset;
  int samples = 1000;
  int samples_per_session = 50;
  unsigned long long seed = 7;
  std::string out;
  int jobs = 1;
};

struct FuseArgs {
  std::string method;
  std::string config;
  std::string weights;
  std::string data;
  std::string out;
  int jobs = 1;
};

struct EvalArgs {
  std::string estimates;
  std::string data;
  std::string matrix;
  std::string out;
  double iou_threshold = 0.5;
  int jobs = 1;
};

struct TuneArgs {
  std::string method = "akf";
  std::string data;
  std::string base;
  std::string out;
  int budget = 40;
  int refine_budget = 20;
  unsigned long long seed = 1;
  int jobs = 1;
};

struct InspectArgs {
  std::string weights;
  std::string parity;
  double tolerance = 1e-4;
  bool tensors = false;
};

void cmd_simulate(const SimulateArgs& a);
void cmd_fuse(const FuseArgs& a);
void cmd_eval(const EvalArgs& a);
void cmd_tune(const TuneArgs& a);
/// Returns false when a parity check fails.
bool cmd_inspect_weights(const InspectArgs& a);

}  // namespace objfusion::cli
