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
#include "objfusion/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace objfusion {
namespace {

using nlohmann::json;

json state_json(const ObjectState& o) {
  return json{{"x", o.x},   {"y", o.y},     {"l", o.l},
              {"w", o.w},   {"vx", o.vx},   {"vy", o.vy},
              {"psi", o.psi}, {"cls", std::string(to_string(o.cls))},
              {"s_e", o.s_e}, {"s_c", o.s_c}};
}

ObjectState state_from(const json& j) {
  ObjectState o;
  o.x = j.at("x").get<double>();
  o.y = j.at("y").get<double>();
  o.l = j.at("l").get<double>();
  o.w = j.at("w").get<double>();
  o.vx = j.value("vx", 0.0);
  o.vy = j.value("vy", 0.0);
  o.psi = j.value("psi", 0.0);
  o.cls = class_from_string(j.at("cls").get<std::string>());
  o.s_e = j.value("s_e", 1.0);
  o.s_c = j.value("s_c", 1.0);
  return o;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T, typename Parse>
std::vector<T> read_lines(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::vector<T> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string record_to_json(const DatasetRecord& rec) {
  json frames = json::array();
  for (const auto& f : rec.frames) {
    json objs = json::array();
    for (const auto& o : f.objects) {
      objs.push_back({{"state", state_json(o.state)}, {"cov", o.cov.var}});
    }
    frames.push_back({{"sensor", std::string(to_string(f.sensor))},
                      {"arrival_time", f.arrival_time},
                      {"objects", objs}});
  }
  json ann = json::array();
  for (const auto& a : rec.annotations) ann.push_back(state_json(a));
  const json j = {{"sample_id", rec.sample_id},
                  {"session", rec.session},
                  {"t_a", rec.annotation_time},
                  {"ego", {{"speed", rec.ego.speed}, {"yaw_rate", rec.ego.yaw_rate}}},
                  {"frames", frames},
                  {"annotations", ann}};
  return j.dump();
}

DatasetRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  DatasetRecord rec;
  rec.sample_id = j.at("sample_id").get<std::string>();
  rec.session = j.value("session", 0);
  rec.annotation_time = j.at("t_a").get<double>();
  rec.ego.speed = j.at("ego").at("speed").get<double>();
  rec.ego.yaw_rate = j.at("ego").at("yaw_rate").get<double>();
  for (const auto& f : j.at("frames")) {
    SensorFrame frame;
    frame.sensor = sensor_from_string(f.at("sensor").get<std::string>());
    frame.arrival_time = f.at("arrival_time").get<double>();
    for (const auto& o : f.at("objects")) {
      TrackedObject t;
      t.state = state_from(o.at("state"));
      t.cov.var = o.at("cov").get<StateVector>();
      frame.objects.push_back(t);
    }
    rec.frames.push_back(std::move(frame));
  }
  for (const auto& a : j.at("annotations")) rec.annotations.push_back(state_from(a));
  return rec;
}

std::vector<DatasetRecord> read_records(const std::string& path) {
  return read_lines<DatasetRecord>(path, record_from_json);
}

void write_records(const std::string& path, const std::vector<DatasetRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  for (const auto& r : recs) out << record_to_json(r) << '\n';
}

std::string manifest_json(const Dataset& ds) {
  json sessions = json::object();
  for (const auto& [s, split] : ds.session_split) {
    sessions[std::to_string(s)] = split;
  }
  json thresholds = json::object();
  for (int t = 0; t < kNumSensorTypes; ++t) {
    thresholds[std::string(to_string(static_cast<SensorType>(t)))] =
        ds.thresholds[static_cast<std::size_t>(t)];
  }
  const json m = {{"domain", ds.domain},
                  {"config", ds.config_json.empty() ? json::object() : json::parse(ds.config_json)},
                  {"confidence_thresholds", thresholds},
                  {"session_split", sessions},
                  {"counts", {{"train", ds.train.size()}, {"val", ds.val.size()}, {"test", ds.test.size()}}}};
  return m.dump(2);
}

void write_dataset(const std::string& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_records((base / "train.jsonl").string(), ds.train);
  write_records((base / "val.jsonl").string(), ds.val);
  write_records((base / "test.jsonl").string(), ds.test);
  std::ofstream m(base / "manifest.json", std::ios::binary);
  m << manifest_json(ds) << '\n';
}

std::string estimate_to_json(const EstimateRecord& e) {
  json objs = json::array();
  for (const auto& o : e.objects) objs.push_back(state_json(o));
  return json{{"sample_id", e.sample_id}, {"objects", objs}, {"latency_ms", e.latency_ms}}.dump();
}

EstimateRecord estimate_from_json(const std::string& line) {
  const json j = json::parse(line);
  EstimateRecord e;
  e.sample_id = j.at("sample_id").get<std::string>();
  for (const auto& o : j.at("objects")) e.objects.push_back(state_from(o));
  e.latency_ms = j.value("latency_ms", 0.0);
  return e;
}

std::vector<EstimateRecord> read_estimates(const std::string& path) {
  return read_lines<EstimateRecord>(path, estimate_from_json);
}

void write_estimates(const std::string& path, const std::vector<EstimateRecord>& es) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  for (const auto& e : es) out << estimate_to_json(e) << '\n';
}

std::string text_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return hex64(h);
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text_hash(bytes);
}

}  // namespace objfusion
