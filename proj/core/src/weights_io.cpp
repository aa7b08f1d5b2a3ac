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
#include "objfusion/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "json.hpp"

namespace objfusion {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "weight I/O assumes a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xffu));
  }
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
  }
  return v;
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

json hp_json(const HiloHyperParams& hp) {
  return json{{"d_model", hp.d_model},
              {"n_heads", hp.n_heads},
              {"n_enc_layers", hp.n_enc_layers},
              {"n_dec_layers", hp.n_dec_layers},
              {"ff_dim", hp.ff_dim},
              {"n_queries", hp.n_queries},
              {"n_classes", hp.n_classes},
              {"decoder_self_attn", hp.decoder_self_attn},
              {"pos_freqs", hp.pos_freqs},
              {"input_feature_layout", hp.input_feature_layout},
              {"input_scale", hp.input_scale},
              {"output_pos_scale", hp.output_pos_scale},
              {"output_extent_scale", hp.output_extent_scale}};
}

HiloHyperParams hp_from(const json& j) {
  HiloHyperParams hp;
  hp.d_model = j.at("d_model").get<int>();
  hp.n_heads = j.at("n_heads").get<int>();
  hp.n_enc_layers = j.at("n_enc_layers").get<int>();
  hp.n_dec_layers = j.at("n_dec_layers").get<int>();
  hp.ff_dim = j.at("ff_dim").get<int>();
  hp.n_queries = j.at("n_queries").get<int>();
  hp.n_classes = j.at("n_classes").get<int>();
  hp.decoder_self_attn = j.value("decoder_self_attn", true);
  hp.pos_freqs = j.at("pos_freqs").get<std::array<double, 2>>();
  hp.input_feature_layout =
      j.at("input_feature_layout").get<std::vector<std::string>>();
  hp.input_scale = j.at("input_scale").get<std::vector<double>>();
  hp.output_pos_scale = j.value("output_pos_scale", hp.output_pos_scale);
  hp.output_extent_scale = j.value("output_extent_scale", hp.output_extent_scale);
  return hp;
}

}  // namespace

std::string hyperparams_to_json(const HiloHyperParams& hp) {
  return hp_json(hp).dump(2);
}

HiloHyperParams hyperparams_from_json(const std::string& text) {
  HiloHyperParams hp = hp_from(json::parse(text));
  hp.validate();
  return hp;
}

std::vector<std::uint8_t> serialize_weights(const HiloHyperParams& hp,
                                            const HiloWeights& w) {
  hp.validate();
  check_shapes(hp, w);
  json manifest = json::array();
  std::uint64_t offset = 0;
  for (const auto& nt : w.tensors) {
    const std::uint64_t length = nt.tensor.data.size() * sizeof(float);
    manifest.push_back({{"name", nt.name},
                        {"shape", nt.tensor.shape},
                        {"offset", offset},
                        {"length", length}});
    offset += length;
  }
  const json header = {{"magic", kWeightMagic},
                       {"format_version", kWeightFormatVersion},
                       {"hyperparams", hp_json(hp)},
                       {"tensors", manifest}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(8 + text.size() + offset);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  const std::size_t payload_start = out.size();
  for (const auto& nt : w.tensors) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(nt.tensor.data.data());
    out.insert(out.end(), p, p + nt.tensor.data.size() * sizeof(float));
  }
  put_u32(out, crc32_of(out.data() + payload_start, out.size() - payload_start));
  return out;
}

LoadedWeights deserialize_weights(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) {
    throw WeightFormatError("weight file truncated");
  }
  const std::uint32_t header_len = get_u32(bytes, 0);
  if (static_cast<std::uint64_t>(header_len) + 8 > bytes.size()) {
    throw WeightFormatError("weight header length exceeds file size");
  }
  json header;
  try {
    header = json::parse(bytes.begin() + 4, bytes.begin() + 4 + header_len);
  } catch (const json::exception& e) {
    throw WeightFormatError(std::string("weight header is not valid JSON: ") + e.what());
  }
  if (header.value("magic", std::string()) != kWeightMagic) {
    throw WeightFormatError("bad magic in weight header");
  }
  const int version = header.value("format_version", -1);
  if (version != kWeightFormatVersion) {
    throw VersionError("unsupported weight format version " + std::to_string(version));
  }

  const std::size_t payload_start = 4 + header_len;
  const std::size_t payload_len = bytes.size() - payload_start - 4;
  const std::uint32_t stored_crc = get_u32(bytes, bytes.size() - 4);
  if (crc32_of(bytes.data() + payload_start, payload_len) != stored_crc) {
    throw ChecksumError("weight payload CRC-32 mismatch");
  }

  LoadedWeights out;
  try {
    out.hp = hp_from(header.at("hyperparams"));
    out.hp.validate();
  } catch (const std::exception& e) {
    throw ShapeError(std::string("invalid hyperparameters: ") + e.what());
  }
  std::uint64_t expected_offset = 0;
  for (const auto& entry : header.at("tensors")) {
    NamedTensor nt;
    nt.name = entry.at("name").get<std::string>();
    nt.tensor.shape = entry.at("shape").get<std::vector<int>>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto length = entry.at("length").get<std::uint64_t>();
    if (offset != expected_offset || offset + length > payload_len ||
        length != static_cast<std::uint64_t>(nt.tensor.numel()) * sizeof(float)) {
      throw ShapeError("manifest entry inconsistent for " + nt.name);
    }
    nt.tensor.data.resize(length / sizeof(float));
    std::memcpy(nt.tensor.data.data(), bytes.data() + payload_start + offset, length);
    expected_offset = offset + length;
    out.weights.tensors.push_back(std::move(nt));
  }
  if (expected_offset != payload_len) {
    throw ShapeError("payload size does not match manifest");
  }
  check_shapes(out.hp, out.weights);
  out.parameter_count = out.weights.parameter_count();
  return out;
}

void save_weights(const std::string& path, const HiloHyperParams& hp,
                  const HiloWeights& w) {
  const auto bytes = serialize_weights(hp, w);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write weight file: " + path);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

LoadedWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open weight file: " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_weights(bytes);
}

}  // namespace objfusion
