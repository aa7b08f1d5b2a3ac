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
// objfusion command-line tool. Exit codes: 0 success, 1 runtime failure,
// 2 usage error.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace objfusion::cli;
  CLI::App app{"objfusion: high-level object fusion experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic dataset (train/val/test JSONL and manifest)");
  s->add_option("--preset", sim.preset,
                "highway, urban, a preset JSON file, or two of these comma-separated to combine")
      ->required();
  s->add_option("--samples", sim.samples, "Samples per domain")->check(CLI::PositiveNumber);
  s->add_option("--samples-per-session", sim.samples_per_session, "Samples per recording session")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_option("--jobs", sim.jobs, "Worker threads (HILO_JOBS overrides)");

  FuseArgs fuse;
  auto* f = app.add_subcommand("fuse", "Fuse every sample of a dataset file");
  f->add_option("--method", fuse.method, "akf, akfa or hilo")
      ->required()
      ->check(CLI::IsMember({"akf", "akfa", "hilo"}));
  f->add_option("--config", fuse.config, "PipelineConfig JSON (akf, akfa)")->check(CLI::ExistingFile);
  f->add_option("--weights", fuse.weights, "HiLO weight file (hilo)")->check(CLI::ExistingFile);
  f->add_option("--data", fuse.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  f->add_option("--out", fuse.out, "Estimates JSONL")->required();
  f->add_option("--jobs", fuse.jobs, "Worker threads (HILO_JOBS overrides)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score estimates against annotations, or run a cross-domain matrix");
  e->add_option("--estimates", ev.estimates, "Estimates JSONL")->check(CLI::ExistingFile);
  e->add_option("--data", ev.data, "Dataset JSONL with annotations")->check(CLI::ExistingFile);
  e->add_option("--matrix", ev.matrix, "Matrix spec JSON; writes a CSV to --out")->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Report JSON, or matrix CSV with --matrix");
  e->add_option("--iou", ev.iou_threshold, "IoU threshold for a true positive");
  e->add_option("--jobs", ev.jobs, "Worker threads (HILO_JOBS overrides)");

  TuneArgs tune;
  auto* t = app.add_subcommand("tune", "Random search of PipelineConfig on a validation split");
  t->add_option("--method", tune.method, "akf or akfa")->check(CLI::IsMember({"akf", "akfa"}));
  t->add_option("--data", tune.data, "Validation JSONL")->required()->check(CLI::ExistingFile);
  t->add_option("--base", tune.base, "Starting PipelineConfig JSON")->check(CLI::ExistingFile);
  t->add_option("--out", tune.out, "Best PipelineConfig JSON")->required();
  t->add_option("--budget", tune.budget, "Global random candidates");
  t->add_option("--refine", tune.refine_budget, "Refinement candidates per stage");
  t->add_option("--seed", tune.seed, "Search seed");
  t->add_option("--jobs", tune.jobs, "Worker threads (HILO_JOBS overrides)");

  InspectArgs insp;
  auto* w = app.add_subcommand("inspect-weights", "Validate a HiLO weight file and print its header");
  w->add_option("weights", insp.weights, "Weight file")->required()->check(CLI::ExistingFile);
  w->add_option("--parity", insp.parity, "Parity fixture JSON to check against")->check(CLI::ExistingFile);
  w->add_option("--tol", insp.tolerance, "Absolute parity tolerance");
  w->add_flag("--tensors", insp.tensors, "List tensor names and shapes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (s->parsed()) cmd_simulate(sim);
    if (f->parsed()) cmd_fuse(fuse);
    if (e->parsed()) cmd_eval(ev);
    if (t->parsed()) cmd_tune(tune);
    if (w->parsed() && !cmd_inspect_weights(insp)) return kExitRuntime;
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
