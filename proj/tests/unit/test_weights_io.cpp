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
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "objfusion/weights_io.hpp"

using namespace objfusion;
using nlohmann::json;

namespace {

// Bitwise CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320).
std::uint32_t crc32_bitwise(const std::uint8_t* p, std::size_t n) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= p[i];
    for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

struct RawTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

// Writes the documented layout without touching the library writer.
std::vector<std::uint8_t> write_reference(const json& hp, const std::vector<RawTensor>& ts,
                                          int version = 1, const char* magic = "HILO") {
  json manifest = json::array();
  std::uint64_t off = 0;
  for (const auto& t : ts) {
    const std::uint64_t len = t.data.size() * 4;
    manifest.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", off}, {"length", len}});
    off += len;
  }
  const std::string header =
      json{{"magic", magic}, {"format_version", version}, {"hyperparams", hp}, {"tensors", manifest}}
          .dump();
  std::vector<std::uint8_t> out;
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  const std::size_t start = out.size();
  for (const auto& t : ts) {
    for (float f : t.data) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_u32(out, u);
    }
  }
  put_u32(out, crc32_bitwise(out.data() + start, out.size() - start));
  return out;
}

std::vector<RawTensor> raw(const HiloWeights& w) {
  std::vector<RawTensor> out;
  for (const auto& nt : w.tensors) out.push_back({nt.name, nt.tensor.shape, nt.tensor.data});
  return out;
}

HiloHyperParams small_hp() {
  HiloHyperParams hp = HiloHyperParams::defaults();
  hp.d_model = 8;
  hp.n_heads = 2;
  hp.ff_dim = 16;
  hp.n_enc_layers = 1;
  hp.n_dec_layers = 1;
  return hp;
}

}  // namespace

TEST_CASE("serialized bytes equal the reference layout") {
  for (const HiloHyperParams& hp : {HiloHyperParams::defaults(), small_hp()}) {
    const HiloWeights w = HiloWeights::random(hp, 9);
    const auto bytes = serialize_weights(hp, w);
    CHECK(bytes == write_reference(json::parse(hyperparams_to_json(hp)), raw(w)));
  }
}

TEST_CASE("reference-written files load") {
  const HiloHyperParams hp = small_hp();
  const HiloWeights w = HiloWeights::random(hp, 10);
  const LoadedWeights l = deserialize_weights(write_reference(json::parse(hyperparams_to_json(hp)), raw(w)));
  CHECK(l.hp == hp);
  CHECK(l.weights == w);
  CHECK(l.parameter_count == w.parameter_count());
}

TEST_CASE("round trip is bit exact across shapes") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> heads(1, 4), mult(1, 6), layers(0, 3), q(1, 30);
  for (int trial = 0; trial < 20; ++trial) {
    HiloHyperParams hp = HiloHyperParams::defaults();
    hp.n_heads = heads(rng);
    hp.d_model = hp.n_heads * mult(rng);
    hp.ff_dim = mult(rng) * 4;
    hp.n_enc_layers = layers(rng);
    hp.n_dec_layers = 1 + layers(rng);
    hp.n_queries = q(rng);
    hp.decoder_self_attn = trial % 2 == 0;
    const HiloWeights w = HiloWeights::random(hp, static_cast<std::uint64_t>(trial), 3.0);
    const LoadedWeights l = deserialize_weights(serialize_weights(hp, w));
    CHECK(l.hp == hp);
    CHECK(l.weights == w);
  }
}

TEST_CASE("save and load through a file") {
  const auto path = std::filesystem::temp_directory_path() / "objfusion_w_test.hilo";
  const HiloHyperParams hp = HiloHyperParams::defaults();
  const HiloWeights w = HiloWeights::random(hp, 13);
  save_weights(path.string(), hp, w);
  const LoadedWeights l = load_weights(path.string());
  CHECK(l.weights == w);
  CHECK(l.parameter_count == 180044);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_weights(path.string()), std::runtime_error);
}

TEST_CASE("tampered payload raises ChecksumError") {
  const HiloHyperParams hp = small_hp();
  auto bytes = serialize_weights(hp, HiloWeights::random(hp, 14));
  const std::uint32_t hlen = bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) | (bytes[3] << 24);
  bytes[4 + hlen + 17] ^= 0x01;
  CHECK_THROWS_AS(deserialize_weights(bytes), ChecksumError);
  auto bytes2 = serialize_weights(hp, HiloWeights::random(hp, 14));
  bytes2.back() ^= 0x80;
  CHECK_THROWS_AS(deserialize_weights(bytes2), ChecksumError);
}

TEST_CASE("query bank of 19 rows under N = 20 raises ShapeError") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  auto ts = raw(HiloWeights::random(hp, 15));
  for (auto& t : ts) {
    if (t.name == "queries") {
      t.shape = {19, hp.d_model};
      t.data.resize(static_cast<std::size_t>(19 * hp.d_model));
    }
  }
  const auto bytes = write_reference(json::parse(hyperparams_to_json(hp)), ts);
  CHECK_THROWS_AS(deserialize_weights(bytes), ShapeError);
}

TEST_CASE("format errors are distinct") {
  const HiloHyperParams hp = small_hp();
  const auto ts = raw(HiloWeights::random(hp, 16));
  const json hpj = json::parse(hyperparams_to_json(hp));
  CHECK_THROWS_AS(deserialize_weights(write_reference(hpj, ts, 2)), VersionError);
  CHECK_THROWS_AS(deserialize_weights(write_reference(hpj, ts, 1, "NOPE")), WeightFormatError);
  CHECK_THROWS_AS(deserialize_weights({1, 2, 3}), WeightFormatError);

  auto missing = ts;
  missing.pop_back();
  CHECK_THROWS_AS(deserialize_weights(write_reference(hpj, missing)), ShapeError);

  json bad_hp = hpj;
  bad_hp["n_heads"] = 3;
  CHECK_THROWS_AS(deserialize_weights(write_reference(bad_hp, ts)), ShapeError);

  auto truncated = serialize_weights(hp, HiloWeights::random(hp, 16));
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS_AS(deserialize_weights(truncated), WeightFormatError);
}

TEST_CASE("hyperparameter json round trip") {
  HiloHyperParams hp = small_hp();
  hp.pos_freqs = {0.01, 0.1};
  hp.input_scale[0] = 42.0;
  CHECK(hyperparams_from_json(hyperparams_to_json(hp)) == hp);
}
