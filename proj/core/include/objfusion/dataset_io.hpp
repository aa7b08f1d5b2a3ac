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

#include "objfusion/scenario.hpp"
#include "objfusion/types.hpp"

namespace objfusion {

// Dataset files are JSON Lines, one DatasetRecord per line, SI units:
//   {"sample_id", "session", "t_a", "ego": {"speed", "yaw_rate"},
//    "frames": [{"sensor", "arrival_time",
//                "objects": [{"state": {...}, "cov": [7 variances]}]}],
//    "annotations": [{x, y, l, w, vx, vy, psi, cls, s_e, s_c}]}

std::string record_to_json(const DatasetRecord& rec);
DatasetRecord record_from_json(const std::string& line);

/// Throws std::runtime_error naming the file and line on a malformed record.
std::vector<DatasetRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<DatasetRecord>& recs);

/// train.jsonl, val.jsonl, test.jsonl and manifest.json under `dir`
/// (created if missing).
void write_dataset(const std::string& dir, const Dataset& ds);
std::string manifest_json(const Dataset& ds);

/// Fused output for one sample.
struct EstimateRecord {
  std::string sample_id;
  std::vector<ObjectState> objects;
  double latency_ms = 0.0;

  bool operator==(const EstimateRecord&) const = default;
};

std::string estimate_to_json(const EstimateRecord& e);
EstimateRecord estimate_from_json(const std::string& line);
std::vector<EstimateRecord> read_estimates(const std::string& path);
void write_estimates(const std::string& path, const std::vector<EstimateRecord>& es);

/// Hex FNV-1a of a file's bytes; used for provenance fields in reports.
std::string file_hash(const std::string& path);
std::string text_hash(const std::string& text);

}  // namespace objfusion
