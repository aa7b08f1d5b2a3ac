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
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "objfusion/geometry.hpp"
#include "objfusion/hilo_model.hpp"
#include "oracles.hpp"

using namespace objfusion;

namespace {

SampleBuffer random_buffer(std::mt19937_64& rng, int n_detections) {
  std::uniform_real_distribution<double> pos(-90, 90), vel(-20, 20), ang(-3.1, 3.1);
  std::uniform_real_distribution<double> ext(0.5, 12.0), sc(0.0, 1.0), lat(0.0, 0.04);
  std::uniform_int_distribution<int> cls(0, kNumClasses - 1), sensor(0, kNumSensors - 1);
  SampleBuffer buf;
  buf.annotation_time = 3.0;
  for (int s = 0; s < kNumSensors; ++s) {
    SensorFrame f;
    f.sensor = static_cast<SensorId>(s);
    f.arrival_time = buf.annotation_time - lat(rng);
    buf.frames.push_back(f);
  }
  for (int k = 0; k < n_detections; ++k) {
    TrackedObject t;
    t.state = {pos(rng), pos(rng), ext(rng), ext(rng), vel(rng), vel(rng), ang(rng),
               static_cast<ObjectClass>(cls(rng)), sc(rng), sc(rng)};
    buf.frames[static_cast<std::size_t>(sensor(rng))].objects.push_back(t);
  }
  return buf;
}

void check_equal_slots(const std::vector<FusedEstimate>& a, const std::vector<FusedEstimate>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(a[n].box == b[n].box);
    CHECK(a[n].logits == b[n].logits);
  }
}

}  // namespace

TEST_CASE("default hyperparameters") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  CHECK_NOTHROW(hp.validate());
  CHECK(hp.n_queries == 20);
  CHECK(hp.d_model % hp.n_heads == 0);
  CHECK(hp.input_feature_layout.size() == 21);
  CHECK(hp.input_dim() == 29);
  CHECK(hp.input_feature_layout.front() == "x");
  CHECK(hp.input_feature_layout.back() == "age");
}

TEST_CASE("parameter count matches a hand count") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  const long d = 64, ff = 128, in = 29, q = 20, c = 6;
  const long lin_dd = d * d + d;
  const long norm = 2 * d;
  const long attn = 4 * lin_dd;
  const long ffn = (ff * d + ff) + (d * ff + d);
  const long enc = 2 * norm + attn + ffn;
  const long dec = 3 * norm + 2 * attn + ffn;
  const long expected = (in * d + d) + lin_dd + d + 2 * enc + norm + q * d + 2 * dec + norm +
                        lin_dd + (6 * d + 6) + (c * d + c);
  CHECK(expected == 180044);
  CHECK(HiloWeights::zeros(hp).parameter_count() == expected);
  // A lighter decoder without query self-attention drops two attention blocks
  HiloHyperParams no_sa = hp;
  no_sa.decoder_self_attn = false;
  CHECK(HiloWeights::zeros(no_sa).parameter_count() == expected - 2 * (attn + norm));
}

TEST_CASE("hyperparameter validation") {
  HiloHyperParams hp = HiloHyperParams::defaults();
  hp.n_heads = 5;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = HiloHyperParams::defaults();
  hp.input_scale.pop_back();
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = HiloHyperParams::defaults();
  hp.input_feature_layout[0] = "speed";
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = HiloHyperParams::defaults();
  hp.input_feature_layout[1] = "x";
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = HiloHyperParams::defaults();
  hp.input_scale[3] = 0.0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

TEST_CASE("position_encode examples") {
  const std::array<double, 2> f{0.005, 0.04};
  const auto z = position_encode(0, 0, f);
  for (int k = 0; k < 2; ++k) {
    CHECK(z[4 * k + 0] == 0.0);
    CHECK(z[4 * k + 1] == 1.0);
    CHECK(z[4 * k + 2] == 0.0);
    CHECK(z[4 * k + 3] == 1.0);
  }
  const auto a = position_encode(50.0, 0.0, f);
  CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(a[1]) < 1e-15);
  const auto p = position_encode(13.7, -4.0, f);
  const auto q = position_encode(13.7 + 1.0 / f[0], -4.0, f);
  CHECK(q[0] == doctest::Approx(p[0]).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(p[1]).epsilon(1e-12));
}

TEST_CASE("embed contracts") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  const HiloModel model(hp, HiloWeights::random(hp, 1));
  std::mt19937_64 rng(1);
  const SampleBuffer buf = random_buffer(rng, 3);
  CHECK(model.embed(buf).rows() == 3);
  CHECK(model.embed(buf).cols() == hp.d_model);

  SampleBuffer twin;
  twin.annotation_time = 1.0;
  twin.frames.resize(1);
  twin.frames[0].arrival_time = 0.98;
  twin.frames[0].objects = {buf.frames[0].objects.empty() ? TrackedObject{} : buf.frames[0].objects[0]};
  twin.frames[0].objects.push_back(twin.frames[0].objects[0]);
  const Eigen::MatrixXf e = model.embed(twin);
  CHECK(e.row(0) == e.row(1));

  const HiloModel zero(hp, HiloWeights::zeros(hp));
  CHECK(zero.embed(buf).isZero(0.0f));
  CHECK(zero.embed(SampleBuffer{}).rows() == 1);
}

TEST_CASE("raw features follow the layout and scale") {
  HiloHyperParams hp = HiloHyperParams::defaults();
  SampleBuffer buf;
  buf.annotation_time = 2.0;
  SensorFrame f;
  f.sensor = SensorId::kRadarRL;
  f.arrival_time = 1.97;
  TrackedObject t;
  t.state = {10, -5, 4, 2, 3, 1, 0.5, ObjectClass::kBicycle, 0.8, 0.7};
  f.objects = {t};
  buf.frames = {f};
  const Eigen::MatrixXd r = raw_features(buf, hp);
  REQUIRE(r.rows() == 1);
  REQUIRE(r.cols() == 29);
  CHECK(r(0, 0) == 10.0);
  CHECK(r(0, 6) == std::sin(0.5));
  CHECK(r(0, 7) == std::cos(0.5));
  CHECK(r(0, 10 + 3) == 1.0);
  CHECK(r(0, 10 + 0) == 0.0);
  CHECK(r(0, 15 + 3) == 1.0);
  CHECK(r(0, 20) == doctest::Approx(0.03));
  CHECK(r(0, 21) == std::sin(kTwoPi * hp.pos_freqs[0] * 10.0));
}

TEST_CASE("forward returns exactly N estimates for every input size") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  const HiloModel model(hp, HiloWeights::random(hp, 2));
  std::mt19937_64 rng(2);
  for (int k : {0, 1, 5, 20, 60}) {
    const auto out = model.forward(random_buffer(rng, k));
    REQUIRE(out.size() == 20);
    for (const auto& e : out) {
      CHECK(e.logits.size() == 6);
      for (double l : e.logits) CHECK(std::isfinite(l));
      CHECK(e.box[2] > 0.0);
      CHECK(e.box[3] > 0.0);
      CHECK(e.box[4] > -kPi - 1e-12);
      CHECK(e.box[4] <= kPi);
    }
  }
}

TEST_CASE("forward agrees with the plain-loop reference") {
  for (bool self_attn : {true, false}) {
    HiloHyperParams hp = HiloHyperParams::defaults();
    hp.decoder_self_attn = self_attn;
    const HiloWeights w = HiloWeights::random(hp, 3);
    const HiloModel model(hp, w);
    const oracle::ReferenceForward ref(hp, w);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const SampleBuffer buf = random_buffer(rng, trial * 3);
      const auto got = model.forward(buf);
      const auto want = ref.run(buf);
      REQUIRE(got.size() == want.size());
      for (std::size_t n = 0; n < got.size(); ++n) {
        for (int k = 0; k < 4; ++k) CHECK(std::fabs(got[n].box[k] - want[n].box[k]) < 1e-4);
        CHECK(std::fabs(wrap_angle(got[n].box[4] - want[n].box[4])) < 1e-4);
        for (std::size_t c = 0; c < 6; ++c)
          CHECK(std::fabs(got[n].logits[c] - want[n].logits[c]) < 1e-4);
      }
    }
  }
}

TEST_CASE("zero weights reduce every slot to the bias path") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  HiloWeights w = HiloWeights::zeros(hp);
  for (auto& v : w.at("class_head.bias").data) v = 0.0f;
  w.at("class_head.bias").data[5] = 1.5f;
  w.at("box_head.2.bias").data = {0.1f, -0.2f, 0.0f, 1.0f, 0.0f, 1.0f};
  const HiloModel model(hp, w);
  std::mt19937_64 rng(4);
  for (int k : {0, 7}) {
    const auto out = model.forward(random_buffer(rng, k));
    for (const auto& e : out) {
      CHECK(e.box[0] == doctest::Approx(10.0).epsilon(1e-6));
      CHECK(e.box[1] == doctest::Approx(-20.0).epsilon(1e-6));
      CHECK(e.box[2] == doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-6));
      CHECK(e.box[3] == doctest::Approx(5.0 * std::log1p(std::exp(1.0))).epsilon(1e-6));
      CHECK(e.box[4] == 0.0);
      CHECK(e.is_no_object());
    }
    CHECK(to_global_set(out).empty());
  }
}

TEST_CASE("forward is exactly permutation invariant") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  const HiloModel model(hp, HiloWeights::random(hp, 5));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const SampleBuffer buf = random_buffer(rng, 20);
    SampleBuffer shuffled = buf;
    for (auto& f : shuffled.frames) std::shuffle(f.objects.begin(), f.objects.end(), rng);
    std::shuffle(shuffled.frames.begin(), shuffled.frames.end(), rng);
    check_equal_slots(model.forward(buf), model.forward(shuffled));
  }
}

TEST_CASE("non-finite intermediates name the layer") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  HiloWeights w = HiloWeights::random(hp, 6);
  w.at("input_mlp.2.bias").data[0] = std::numeric_limits<float>::infinity();
  const HiloModel bad(hp, w);
  std::mt19937_64 rng(6);
  try {
    (void)bad.forward(random_buffer(rng, 4));
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("input_mlp") != std::string::npos);
  }
  HiloWeights w2 = HiloWeights::random(hp, 6);
  w2.at("decoder.1.ffn.2.bias").data[3] = std::numeric_limits<float>::quiet_NaN();
  const HiloModel bad2(hp, w2);
  try {
    (void)bad2.forward(random_buffer(rng, 4));
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("decoder.1.ffn") != std::string::npos);
  }
}

TEST_CASE("FusedEstimate derived fields") {
  FusedEstimate e;
  e.box = {1, 2, 3, 4, 0.5};
  e.logits = {0.0, 2.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(e.class_index() == 1);
  CHECK_FALSE(e.is_no_object());
  const double z = std::exp(2.0) + 5.0;
  CHECK(e.confidence() == doctest::Approx(std::exp(2.0) / z));
  const ObjectState o = e.to_object();
  CHECK(o.cls == ObjectClass::kTruck);
  CHECK(o.x == 1.0);
  CHECK(o.psi == 0.5);
  CHECK(o.s_e == doctest::Approx(e.confidence()));
}

TEST_CASE("shape checking") {
  const HiloHyperParams hp = HiloHyperParams::defaults();
  HiloWeights w = HiloWeights::zeros(hp);
  w.at("queries").shape = {19, 64};
  w.at("queries").data.resize(19 * 64);
  CHECK_THROWS(HiloModel(hp, w));
  HiloWeights missing = HiloWeights::zeros(hp);
  missing.tensors.pop_back();
  CHECK_THROWS(HiloModel(hp, missing));
}
