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
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "objfusion/experiment.hpp"
#include "objfusion/pipeline_config.hpp"

using namespace objfusion;

TEST_CASE("default configuration is plain AKF and valid") {
  const PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK_FALSE(cfg.is_akfa());
  CHECK(cfg.assoc_dims.size() == 4);
  CHECK(cfg.kappa == 1.0);
  CHECK(cfg.ego_compensation);
}

TEST_CASE("validation rejects out-of-range values") {
  PipelineConfig c;
  c.alpha = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.alpha = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.q_diag[kVx] = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.extra_meas_cov[1][kX] = -0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.assoc_dims = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.assoc_dims = {kX, kX};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PipelineConfig{};
  c.kappa = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("json round trip is exact") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const PipelineConfig c = sample_pipeline_config(17, i, PipelineConfig{});
    CHECK(PipelineConfig::from_json(c.to_json()) == c);
    CHECK(PipelineConfig::from_json(c.to_json(-1)) == c);
  }
  PipelineConfig akfa;
  akfa.extra_meas_cov[0][kY] = 0.125;
  akfa.ego_compensation = false;
  akfa.assoc_dims = {kX, kY};
  CHECK(akfa.is_akfa());
  CHECK(PipelineConfig::from_json(akfa.to_json()) == akfa);
}

TEST_CASE("json parsing fills defaults and rejects unknown names") {
  const PipelineConfig c = PipelineConfig::from_json(R"({"alpha": 0.05})");
  CHECK(c.alpha == 0.05);
  CHECK(c.epsilon == PipelineConfig{}.epsilon);
  CHECK_THROWS(PipelineConfig::from_json(R"({"extra_meas_cov": {"lidar": {}}})"));
  CHECK_THROWS(PipelineConfig::from_json(R"({"assoc_dims": ["z"]})"));
  CHECK_THROWS(PipelineConfig::from_json(R"({"alpha": 2.0})"));
  CHECK_THROWS(PipelineConfig::from_json("{not json"));
}

TEST_CASE("save and load") {
  const auto path = std::filesystem::temp_directory_path() / "objfusion_cfg_test.json";
  PipelineConfig c;
  c.output_conf_threshold = 0.3;
  c.save(path.string());
  CHECK(PipelineConfig::load(path.string()) == c);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(PipelineConfig::load(path.string()), std::runtime_error);
}
