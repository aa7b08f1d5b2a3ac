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
#include "objfusion/parity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "objfusion/dataset_io.hpp"
#include "objfusion/geometry.hpp"

namespace objfusion {

using nlohmann::json;

std::string parity_to_json(const ParityFixture& f) {
  json samples = json::array();
  for (const auto& s : f.samples) {
    json slots = json::array();
    for (const auto& e : s.slots) slots.push_back({{"box", e.box}, {"logits", e.logits}});
    samples.push_back({{"record", json::parse(record_to_json(s.record))}, {"slots", slots}});
  }
  return json{{"format_version", 1}, {"weights_crc32", f.weights_crc32}, {"samples", samples}}
      .dump();
}

ParityFixture parity_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format_version", 0) != 1) {
    throw std::runtime_error("parity fixture: unsupported format_version");
  }
  ParityFixture f;
  f.weights_crc32 = j.value("weights_crc32", std::string());
  for (const auto& s : j.at("samples")) {
    ParitySample ps;
    ps.record = record_from_json(s.at("record").dump());
    for (const auto& slot : s.at("slots")) {
      FusedEstimate e;
      e.box = slot.at("box").get<std::array<double, 5>>();
      e.logits = slot.at("logits").get<std::vector<double>>();
      ps.slots.push_back(std::move(e));
    }
    f.samples.push_back(std::move(ps));
  }
  return f;
}

ParityFixture load_parity_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parity_from_json(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_parity_fixture(const std::string& path, const ParityFixture& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << parity_to_json(f) << '\n';
}

ParityReport check_parity(const HiloModel& model, const ParityFixture& fixture) {
  ParityReport rep;
  for (std::size_t s = 0; s < fixture.samples.size(); ++s) {
    const auto& expected = fixture.samples[s].slots;
    const auto got = model.forward(fixture.samples[s].record.buffer());
    if (got.size() != expected.size()) {
      rep.slot_count_mismatch = true;
      continue;
    }
    for (std::size_t n = 0; n < got.size(); ++n) {
      auto consider = [&](double err) {
        if (err > rep.max_abs_error || rep.worst_sample < 0) {
          if (err > rep.max_abs_error) rep.max_abs_error = err;
          rep.worst_sample = static_cast<int>(s);
          rep.worst_slot = static_cast<int>(n);
        }
      };
      for (int k = 0; k < 4; ++k) consider(std::fabs(got[n].box[k] - expected[n].box[k]));
      consider(std::fabs(wrap_angle(got[n].box[4] - expected[n].box[4])));
      if (got[n].logits.size() != expected[n].logits.size()) {
        rep.slot_count_mismatch = true;
        continue;
      }
      for (std::size_t c = 0; c < got[n].logits.size(); ++c) {
        consider(std::fabs(got[n].logits[c] - expected[n].logits[c]));
      }
    }
  }
  return rep;
}

}  // namespace objfusion
