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
#include <stdexcept>
#include <string>
#include <vector>

#include "objfusion/hilo_model.hpp"

namespace objfusion {

// Weight file layout (all integers little-endian):
//   u32 header_length
//   header_length bytes of UTF-8 JSON:
//     {"magic": "HILO", "format_version": 1, "hyperparams": {...},
//      "tensors": [{"name", "shape", "offset", "length"}, ...]}
//     offset/length are in bytes relative to the payload start.
//   payload: IEEE-754 float32 values, tensors in manifest order
//   u32 CRC-32 (IEEE) of the payload

inline constexpr const char* kWeightMagic = "HILO";
inline constexpr int kWeightFormatVersion = 1;

class WeightFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChecksumError : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};

class ShapeError : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};

class VersionError : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};

struct LoadedWeights {
  HiloHyperParams hp;
  HiloWeights weights;
  std::int64_t parameter_count = 0;
};

std::string hyperparams_to_json(const HiloHyperParams& hp);
HiloHyperParams hyperparams_from_json(const std::string& text);

std::vector<std::uint8_t> serialize_weights(const HiloHyperParams& hp,
                                            const HiloWeights& w);
LoadedWeights deserialize_weights(const std::vector<std::uint8_t>& bytes);

void save_weights(const std::string& path, const HiloHyperParams& hp,
                  const HiloWeights& w);
LoadedWeights load_weights(const std::string& path);

}  // namespace objfusion
