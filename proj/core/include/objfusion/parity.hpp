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

#include <string>
#include <vector>

#include "objfusion/hilo_model.hpp"
#include "objfusion/scenario.hpp"

namespace objfusion {

// Parity fixture (JSON), written by the training side and consumed here:
//   {"format_version": 1, "weights_crc32": "<hex>",
//    "samples": [{"record": <dataset record>,
//                 "slots": [{"box": [x, y, l, w, psi], "logits": [...]}]}]}

struct ParitySample {
  DatasetRecord record;
  std::vector<FusedEstimate> slots;
};

struct ParityFixture {
  std::string weights_crc32;
  std::vector<ParitySample> samples;
};

std::string parity_to_json(const ParityFixture& f);
ParityFixture parity_from_json(const std::string& text);
ParityFixture load_parity_fixture(const std::string& path);
void save_parity_fixture(const std::string& path, const ParityFixture& f);

struct ParityReport {
  double max_abs_error = 0.0;
  /// First (sample index, slot index) reaching max_abs_error; -1 if none.
  int worst_sample = -1;
  int worst_slot = -1;
  bool slot_count_mismatch = false;

  bool passed(double tol) const { return !slot_count_mismatch && max_abs_error <= tol; }
};

/// Runs the model on every fixture record and compares boxes and logits.
/// Yaw differences are wrapped.
ParityReport check_parity(const HiloModel& model, const ParityFixture& fixture);

}  // namespace objfusion
