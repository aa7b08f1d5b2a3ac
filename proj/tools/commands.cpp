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
#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "objfusion/dataset_io.hpp"
#include "objfusion/evaluation.hpp"
#include "objfusion/experiment.hpp"
#include "objfusion/parallel.hpp"
#include "objfusion/parity.hpp"
#include "objfusion/pipeline_config.hpp"
#include "objfusion/scenario.hpp"
#include "objfusion/weights_io.hpp"

namespace objfusion::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Resolved-config snapshot written next to a run's outputs. Contains only
/// inputs that determine the outputs, so reruns produce identical bytes.
void write_snapshot(const fs::path& path, const std::string& command, json body) {
  body["command"] = command;
  body["tool_version"] = kToolVersion;
  write_text(path, body.dump(2));
}

fs::path sidecar(const std::string& out, const std::string& suffix) { return fs::path(out + suffix); }

std::string weights_crc_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::streamoff size = in.tellg();
  if (size < 8) throw WeightFormatError(path + ": file too short");
  in.seekg(size - 4);
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  const unsigned crc = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<unsigned>(b[3]) << 24);
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

LoadedWeights load_weights_or_throw(const std::string& path) {
  try {
    return load_weights(path);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

DomainPreset preset_from_arg(const std::string& name) {
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
    return DomainPreset::from_json(read_text(name));
  }
  try {
    return DomainPreset::by_name(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

PipelineConfig pipeline_for(const std::string& method, const std::string& config_path) {
  PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
  // AKF is the configuration without additional measurement covariance.
  if (method == "akf") cfg.extra_meas_cov = {};
  cfg.validate();
  return cfg;
}

json timing_json(const TimingStats& t) {
  return {{"samples", t.per_sample_ms.size()},
          {"mean_ms", t.mean_ms},
          {"median_ms", t.median_ms},
          {"p99_ms", t.p99_ms}};
}

/// Fuses every record; the first failing record is reported with its file and
/// index. Output order follows input order.
std::vector<std::vector<ObjectState>> fuse_records(const std::vector<DatasetRecord>& recs,
                                                   const std::string& data_path,
                                                   const std::string& method,
                                                   const PipelineConfig* cfg,
                                                   const HiloModel* model, int jobs,
                                                   TimingStats* timing) {
  std::vector<std::vector<ObjectState>> out(recs.size());
  std::vector<double> ms(recs.size(), 0.0);
  std::vector<std::string> errors(recs.size());
  const std::optional<AkfFuser> fuser = cfg ? std::optional<AkfFuser>(*cfg) : std::nullopt;
  parallel_for(recs.size(), jobs, [&](std::size_t i) {
    try {
      const SampleBuffer buf = recs[i].buffer();
      const auto t0 = std::chrono::steady_clock::now();
      if (method == "hilo") {
        const auto est = hilo_forward(buf, *model);
        ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& g : to_global_set(est)) out[i].push_back(g.state);
      } else {
        const GlobalObjectSet fused = (*fuser)(buf);
        ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& g : fused) out[i].push_back(g.state);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error(data_path + ": record " + std::to_string(i) + " (" + recs[i].sample_id +
                               "): " + errors[i]);
    }
  }
  if (timing) *timing = TimingStats::from(std::move(ms));
  return out;
}

MetricReport score(const std::vector<std::vector<ObjectState>>& fused, const std::vector<DatasetRecord>& recs,
                   double iou, int jobs) {
  std::vector<std::vector<ObjectState>> ann;
  ann.reserve(recs.size());
  for (const auto& r : recs) ann.push_back(r.annotations);
  return compute_metrics(evaluate(fused, ann, jobs, iou));
}

json provenance_of(const std::string& path) {
  json p = {{"path", path}, {"hash", file_hash(path)}};
  const fs::path manifest = fs::path(path).parent_path() / "manifest.json";
  if (fs::exists(manifest)) p["manifest_hash"] = file_hash(manifest.string());
  const fs::path snapshot = sidecar(path, ".resolved.json");
  if (fs::exists(snapshot)) p["config_hash"] = file_hash(snapshot.string());
  return p;
}

std::string resolve_relative(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (base / path).string();
}

void eval_matrix(const EvalArgs& a, int jobs) {
  const json spec = json::parse(read_text(a.matrix));
  const fs::path base = fs::path(a.matrix).parent_path();
  const auto methods = spec.at("methods").get<std::vector<std::string>>();
  const auto sources = spec.at("sources").get<std::vector<std::string>>();
  std::vector<std::string> targets;
  std::map<std::string, std::string> target_data;
  for (const auto& t : spec.at("targets")) {
    const std::string name = t.at("name").get<std::string>();
    targets.push_back(name);
    target_data[name] = resolve_relative(base, t.at("data").get<std::string>());
  }
  std::map<std::string, std::vector<DatasetRecord>> test_sets;
  std::vector<std::string> provenance = {"matrix spec " + a.matrix + " " + file_hash(a.matrix)};
  for (const auto& t : targets) {
    test_sets[t] = read_records(target_data[t]);
    const json p = provenance_of(target_data[t]);
    provenance.push_back("target " + t + " " + p.dump());
  }
  auto artifact = [&](const std::string& m, const std::string& s) -> std::optional<std::string> {
    if (!spec.contains("artifacts") || !spec["artifacts"].contains(m) || !spec["artifacts"][m].contains(s)) {
      return std::nullopt;
    }
    const std::string p = resolve_relative(base, spec["artifacts"][m][s].get<std::string>());
    if (!fs::exists(p)) return std::nullopt;
    return p;
  };
  for (const auto& m : methods) {
    for (const auto& s : sources) {
      const auto p = artifact(m, s);
      provenance.push_back("artifact " + m + "/" + s + " " + (p ? *p + " " + file_hash(*p) : std::string("missing")));
    }
  }
  const auto cells = cross_domain_matrix(
      methods, sources, targets,
      [&](const std::string& m, const std::string& s, const std::string& t) -> std::optional<MetricReport> {
        const auto p = artifact(m, s);
        if (!p) return std::nullopt;
        std::string method = m;
        for (auto& c : method) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const auto& recs = test_sets.at(t);
        if (method == "hilo") {
          LoadedWeights w = load_weights_or_throw(*p);
          const HiloModel model(w.hp, std::move(w.weights));
          return score(fuse_records(recs, target_data[t], method, nullptr, &model, jobs, nullptr), recs,
                       a.iou_threshold, jobs);
        }
        const PipelineConfig cfg = pipeline_for(method == "akf" ? "akf" : "akfa", *p);
        return score(fuse_records(recs, target_data[t], method, &cfg, nullptr, jobs, nullptr), recs,
                     a.iou_threshold, jobs);
      });
  write_text(a.out, matrix_to_csv(cells, provenance));
  write_snapshot(sidecar(a.out, ".resolved.json"), "eval",
                 {{"matrix", spec}, {"matrix_path", a.matrix}, {"iou_threshold", a.iou_threshold}});
  std::cout << matrix_summary(cells);
}

}  // namespace

int resolve_jobs(int flag_value) {
  if (const char* env = std::getenv("HILO_JOBS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw UsageError("HILO_JOBS must be a positive integer");
    return static_cast<int>(n);
  }
  if (flag_value < 1) throw UsageError("--jobs must be at least 1");
  return flag_value;
}

void cmd_simulate(const SimulateArgs& a) {
  const int jobs = resolve_jobs(a.jobs);
  const auto names = split_commas(a.preset);
  if (names.empty() || names.size() > 2) {
    throw UsageError("--preset takes one preset or two comma-separated presets to combine");
  }
  std::vector<Dataset> parts;
  json presets = json::array();
  for (const auto& n : names) {
    DatasetConfig cfg;
    cfg.preset = preset_from_arg(n);
    cfg.n_samples = a.samples;
    cfg.samples_per_session = a.samples_per_session;
    cfg.seed = a.seed;
    cfg.jobs = jobs;
    try {
      cfg.preset.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    parts.push_back(generate_dataset(cfg));
    presets.push_back(json::parse(cfg.preset.to_json()));
  }
  const Dataset ds = parts.size() == 1 ? parts[0] : combine_datasets(parts[0], parts[1]);
  write_dataset(a.out, ds);
  write_snapshot(fs::path(a.out) / "resolved_config.json", "simulate",
                 {{"presets", presets},
                  {"samples", a.samples},
                  {"samples_per_session", a.samples_per_session},
                  {"seed", a.seed},
                  {"combined", parts.size() == 2}});
  std::cout << json{{"out", a.out},
                    {"domain", ds.domain},
                    {"train", ds.train.size()},
                    {"val", ds.val.size()},
                    {"test", ds.test.size()}}
                   .dump()
            << '\n';
}

void cmd_fuse(const FuseArgs& a) {
  const int jobs = resolve_jobs(a.jobs);
  if (a.method == "hilo" && a.weights.empty()) throw UsageError("--method hilo requires --weights");
  if (a.method == "hilo" && !a.config.empty()) throw UsageError("--config applies to akf and akfa only");
  if (a.method != "hilo" && !a.weights.empty()) throw UsageError("--weights applies to hilo only");

  const std::vector<DatasetRecord> recs = read_records(a.data);
  json snapshot = {{"method", a.method}, {"data", provenance_of(a.data)}};
  TimingStats timing;
  std::vector<std::vector<ObjectState>> fused;
  if (a.method == "hilo") {
    LoadedWeights w = load_weights_or_throw(a.weights);
    snapshot["weights"] = {{"path", a.weights}, {"crc32", weights_crc_hex(a.weights)},
                           {"hyperparams", json::parse(hyperparams_to_json(w.hp))}};
    const HiloModel model(w.hp, std::move(w.weights));
    fused = fuse_records(recs, a.data, a.method, nullptr, &model, jobs, &timing);
  } else {
    const PipelineConfig cfg = pipeline_for(a.method, a.config);
    snapshot["pipeline_config"] = json::parse(cfg.to_json());
    fused = fuse_records(recs, a.data, a.method, &cfg, nullptr, jobs, &timing);
  }
  std::vector<EstimateRecord> est(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    // Latency stays out of the estimates so reruns are byte-identical.
    est[i] = {recs[i].sample_id, std::move(fused[i]), 0.0};
  }
  write_estimates(a.out, est);
  write_snapshot(sidecar(a.out, ".resolved.json"), "fuse", snapshot);
  json t = timing_json(timing);
  t["jobs"] = jobs;
  json detailed = t;
  detailed["per_sample_ms"] = timing.per_sample_ms;
  write_text(sidecar(a.out, ".timing.json"), detailed.dump(2));
  std::cout << t.dump() << '\n';
}

void cmd_eval(const EvalArgs& a) {
  const int jobs = resolve_jobs(a.jobs);
  if (!(a.iou_threshold > 0.0 && a.iou_threshold <= 1.0)) throw UsageError("--iou must be in (0, 1]");
  if (!a.matrix.empty()) {
    if (!a.estimates.empty() || !a.data.empty()) throw UsageError("--matrix excludes --estimates and --data");
    if (a.out.empty()) throw UsageError("--matrix requires --out for the CSV");
    eval_matrix(a, jobs);
    return;
  }
  if (a.estimates.empty() || a.data.empty()) throw UsageError("eval needs --estimates and --data, or --matrix");

  const auto est = read_estimates(a.estimates);
  const auto recs = read_records(a.data);
  std::vector<std::vector<ObjectState>> fused(recs.size());
  // An empty estimates file means no output for any sample.
  if (!est.empty()) {
    const std::size_t n = std::max(est.size(), recs.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string e = i < est.size() ? est[i].sample_id : "<none>";
      const std::string d = i < recs.size() ? recs[i].sample_id : "<none>";
      if (e != d) {
        throw std::runtime_error("sample-id misalignment at index " + std::to_string(i) + ": estimates '" + e +
                                 "' vs data '" + d + "'");
      }
      fused[i] = est[i].objects;
    }
  }
  const MetricReport r = score(fused, recs, a.iou_threshold, jobs);
  json report = json::parse(r.to_json());
  report["samples"] = recs.size();
  report["iou_threshold"] = a.iou_threshold;
  report["provenance"] = {{"estimates", provenance_of(a.estimates)}, {"data", provenance_of(a.data)}};
  if (!a.out.empty()) {
    write_text(a.out, report.dump(2));
    write_snapshot(sidecar(a.out, ".resolved.json"), "eval",
                   {{"estimates", a.estimates}, {"data", a.data}, {"iou_threshold", a.iou_threshold}});
  }
  std::cout << report.dump(2) << '\n';
}

void cmd_tune(const TuneArgs& a) {
  const int jobs = resolve_jobs(a.jobs);
  if (a.budget < 1) throw UsageError("--budget must be at least 1");
  if (a.refine_budget < 0) throw UsageError("--refine must be non-negative");
  const auto val = read_records(a.data);
  if (val.empty()) throw std::runtime_error(a.data + ": no validation records");
  const PipelineConfig base = a.base.empty() ? PipelineConfig{} : PipelineConfig::load(a.base);
  TuneOptions opt;
  opt.budget = a.budget;
  opt.refine_budget = a.refine_budget;
  opt.akfa = a.method == "akfa";
  opt.seed = a.seed;
  opt.jobs = jobs;
  const TuneResult r = tune_pipeline(val, opt, base);
  r.best.save(a.out);
  std::ostringstream log;
  for (const auto& e : r.log) {
    log << json{{"iteration", e.iteration},
                {"stage", e.stage},
                {"objective", e.objective},
                {"report", json::parse(e.report.to_json(-1))},
                {"config", json::parse(e.config.to_json(-1))}}
               .dump()
        << '\n';
  }
  std::string text = log.str();
  if (!text.empty()) text.pop_back();
  write_text(sidecar(a.out, ".log.jsonl"), text);
  write_snapshot(sidecar(a.out, ".resolved.json"), "tune",
                 {{"method", a.method},
                  {"data", provenance_of(a.data)},
                  {"base", json::parse(base.to_json())},
                  {"budget", a.budget},
                  {"refine_budget", a.refine_budget},
                  {"seed", a.seed}});
  json summary = json::parse(r.best_report.to_json());
  summary["objective"] = r.best_report.objective();
  summary["candidates"] = r.log.size();
  std::cout << summary.dump(2) << '\n';
}

bool cmd_inspect_weights(const InspectArgs& a) {
  const LoadedWeights w = load_weights_or_throw(a.weights);
  const std::string crc = weights_crc_hex(a.weights);
  json out = {{"path", a.weights},
              {"format_version", kWeightFormatVersion},
              {"crc32", crc},
              {"parameter_count", w.parameter_count},
              {"tensor_count", w.weights.tensors.size()},
              {"hyperparams", json::parse(hyperparams_to_json(w.hp))}};
  if (a.tensors) {
    json list = json::array();
    for (const auto& t : w.weights.tensors) list.push_back({{"name", t.name}, {"shape", t.tensor.shape}});
    out["tensors"] = list;
  }
  bool passed = true;
  if (!a.parity.empty()) {
    const ParityFixture fixture = load_parity_fixture(a.parity);
    if (!fixture.weights_crc32.empty() && fixture.weights_crc32 != crc) {
      throw std::runtime_error(a.parity + ": fixture was made for weights with CRC " + fixture.weights_crc32 +
                               ", file has " + crc);
    }
    const HiloModel model(w.hp, w.weights);
    const ParityReport r = check_parity(model, fixture);
    passed = r.passed(a.tolerance);
    out["parity"] = {{"fixture", a.parity},
                     {"samples", fixture.samples.size()},
                     {"max_abs_error", r.max_abs_error},
                     {"worst_sample", r.worst_sample},
                     {"worst_slot", r.worst_slot},
                     {"slot_count_mismatch", r.slot_count_mismatch},
                     {"tolerance", a.tolerance},
                     {"passed", passed}};
  }
  std::cout << out.dump(2) << '\n';
  return passed;
}

}  // namespace objfusion::cli
