// Copyright 2026 The Unicap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "common/error.h"
#include "common/rng.h"
#include "doctest.h"
#include "nn/adam.h"
#include "nn/checkpoint.h"
#include "nn/gradient_check.h"
#include "nn/layers.h"
#include "nn/ops.h"
#include "test_util.h"

namespace unicap::nn {
namespace {

// Treats an input tensor as a parameter so the checker perturbs it.
ParamBlock<double>& AddInput(ParameterStore<double>& store, const std::string& name, int rows, int cols,
                             Rng& rng) {
  auto& b = store.Add(name, {static_cast<uint32_t>(rows), static_cast<uint32_t>(cols)});
  for (auto& v : b.value) v = rng.Uniform(-1.0, 1.0);
  return b;
}

Matrix<double> AsMatrix(const ParamBlock<double>& b) {
  Matrix<double> m(static_cast<int>(b.shape[0]), static_cast<int>(b.shape[1]));
  std::copy(b.value.begin(), b.value.end(), m.values().begin());
  return m;
}

void AddGrad(ParamBlock<double>& b, const Matrix<double>& g) {
  for (size_t i = 0; i < b.size(); ++i) b.grad[i] += g.values()[i];
}

// Fixed random projection turning a matrix into a scalar loss.
double Project(const Matrix<double>& y, uint64_t seed, Matrix<double>* dy) {
  Rng rng(seed);
  double s = 0;
  if (dy) dy->Reset(y.rows(), y.cols());
  for (size_t i = 0; i < y.size(); ++i) {
    const double w = rng.Uniform(-1.0, 1.0);
    s += w * y.values()[i];
    if (dy) dy->values()[i] = w;
  }
  return s;
}

TEST_CASE("gru with zero weights halves the state") {
  ParameterStore<double> store;
  Rng rng(1);
  auto gru = GruCell<double>::Create(store, "g", 3, 4, rng);
  for (auto& b : store.blocks()) std::fill(b.value.begin(), b.value.end(), 0.0);
  Matrix<double> x(1, 3, 0.7), h(1, 4, 1.0), out;
  GruCell<double>::Cache cache;
  gru.Forward(x, h, &cache, &out);
  for (int k = 0; k < 4; ++k) {
    CHECK(cache.z(0, k) == 0.5);
    CHECK(cache.n(0, k) == 0.0);
    CHECK(out(0, k) == 0.5);
  }
}

TEST_CASE("identity linear layer") {
  ParameterStore<double> store;
  Rng rng(1);
  auto lin = Linear<double>::Create(store, "l", 3, 3, rng);
  std::fill(lin.weight().value.begin(), lin.weight().value.end(), 0.0);
  for (int i = 0; i < 3; ++i) lin.weight().value[i * 3 + i] = 1.0;
  Matrix<double> x(2, 3), y;
  for (size_t i = 0; i < x.size(); ++i) x.values()[i] = 0.25 * i - 0.3;
  lin.Forward(x, &y);
  CHECK(y.values() == x.values());
  Matrix<double> bad(2, 4);
  CHECK_THROWS_AS(lin.Forward(bad, &y), ShapeError);
}

TEST_CASE("shape errors name both shapes") {
  ParameterStore<double> store;
  Rng rng(1);
  auto lin = Linear<double>::Create(store, "proj", 3, 5, rng);
  Matrix<double> x(2, 4), y;
  try {
    lin.Forward(x, &y);
    FAIL("expected shape error");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2 x 4]") != std::string::npos);
    CHECK(what.find("[3 x 5]") != std::string::npos);
  }
}

TEST_CASE("gru cell gradient matches finite differences") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    ParameterStore<double> store;
    Rng rng(seed);
    auto gru = GruCell<double>::Create(store, "g", 3, 4, rng);
    UniformInit(store.Get("g.b"), 0.5, rng);
    auto& xb = AddInput(store, "x", 2, 3, rng);
    auto& hb = AddInput(store, "h", 2, 4, rng);
    auto loss = [&](bool backward) {
      GruCell<double>::Cache cache;
      Matrix<double> out;
      gru.Forward(AsMatrix(xb), AsMatrix(hb), &cache, &out);
      double s = 0;
      for (double v : out.values()) s += v;
      if (backward) {
        Matrix<double> dh_out(out.rows(), out.cols(), 1.0), dx, dh;
        gru.Backward(cache, dh_out, &dx, &dh);
        AddGrad(xb, dx);
        AddGrad(hb, dh);
      }
      return s;
    };
    const auto report = CheckGradients(store, loss, {.tolerance = 1e-6});
    INFO(report.Summary());
    CHECK(report.passed);
  }
}

TEST_CASE("cross-entropy closed forms") {
  Matrix<double> uniform(2, 5, 0.3);
  const std::vector<int> targets = {1, 4};
  const std::vector<double> w = {1, 1};
  auto r = SoftmaxCrossEntropy<double>(uniform, targets, w, 1.0, nullptr);
  CHECK(r.loss_sum / r.count == doctest::Approx(std::log(5.0)).epsilon(1e-12));

  Matrix<double> peaked(2, 5, -1e4);
  peaked(0, 1) = 0;
  peaked(1, 4) = 0;
  r = SoftmaxCrossEntropy<double>(peaked, targets, w, 1.0, nullptr);
  CHECK(r.loss_sum == doctest::Approx(0.0));

  // Logits (1, 2, 3), target index 0: -log(e / (e + e^2 + e^3)).
  Matrix<double> three(1, 3);
  three(0, 0) = 1;
  three(0, 1) = 2;
  three(0, 2) = 3;
  const std::vector<int> t0 = {0};
  const std::vector<double> w0 = {1};
  r = SoftmaxCrossEntropy<double>(three, t0, w0, 1.0, nullptr);
  const double e = std::exp(1.0);
  CHECK(r.loss_sum == doctest::Approx(-std::log(e / (e + e * e + e * e * e))).epsilon(1e-12));
}

TEST_CASE("gradient check reports constant loss and catches a corrupted backward") {
  ParameterStore<double> store;
  Rng rng(2);
  auto lin = Linear<double>::Create(store, "l", 3, 2, rng);
  auto report = CheckGradients(store, [](bool) { return 4.0; });
  CHECK(report.passed);
  for (const auto& b : store.blocks())
    for (double g : b.grad) CHECK(g == 0.0);

  Matrix<double> x(2, 3);
  for (size_t i = 0; i < x.size(); ++i) x.values()[i] = 0.1 * i + 0.2;
  auto corrupted = [&](bool backward) {
    Matrix<double> y, dy;
    lin.Forward(x, &y);
    const double s = Project(y, 9, &dy);
    if (backward) {
      lin.Backward(x, dy, nullptr);
      lin.weight().grad[0] *= 1.5;
    }
    return s;
  };
  report = CheckGradients(store, corrupted);
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.failures.empty());
}

TEST_CASE("adam single step and hand recursion") {
  ParameterStore<double> store;
  auto& p = store.Add("p", {1});
  Adam<double> adam(store, {.lr = 1e-3});
  p.grad[0] = 1.0;
  adam.Step();
  // m = 0.1, v = 0.001; corrected: 1 and 1; step = lr * 1 / (1 + eps).
  CHECK(p.value[0] == doctest::Approx(-1e-3 / (1 + 1e-8)).epsilon(1e-12));
  CHECK(p.grad[0] == 0.0);

  p.grad[0] = 1.0;
  adam.Step();
  const double m2 = 0.9 * 0.1 + 0.1, v2 = 0.999 * 0.001 + 0.001;
  const double step2 = 1e-3 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  CHECK(adam.first_moment(0)[0] == doctest::Approx(m2).epsilon(1e-14));
  CHECK(adam.second_moment(0)[0] == doctest::Approx(v2).epsilon(1e-14));
  CHECK(p.value[0] == doctest::Approx(-1e-3 / (1 + 1e-8) - step2).epsilon(1e-12));
  CHECK(adam.step_count() == 2);
}

TEST_CASE("adam with zero gradient leaves parameters") {
  ParameterStore<double> store;
  auto& p = store.Add("p", {3});
  p.value = {0.5, -1, 2};
  Adam<double> adam(store, {});
  for (int i = 0; i < 3; ++i) adam.Step();
  CHECK(p.value == std::vector<double>{0.5, -1, 2});
}

TEST_CASE("checkpoint round trip is byte identical") {
  ParameterStore<float> a, b;
  Rng rng(5);
  Linear<float>::Create(a, "enc.proj", 4, 3, rng);
  GruCell<float>::Create(b, "dec.gru", 3, 2, rng);
  testing::TempDir dir("ckpt");
  SaveCheckpoint(dir / "one.ckpt", {&a, &b});
  const auto loaded = LoadCheckpoint(dir / "one.ckpt");
  CHECK(loaded.blocks().size() == 5);
  CHECK(loaded.Get("enc.proj.w").value == a.Get("enc.proj.w").value);
  CHECK(loaded.Get("dec.gru.wh").shape == b.Get("dec.gru.wh").shape);
  SaveCheckpoint(dir / "two.ckpt", {&loaded});
  const auto bytes = testing::ReadFile(dir / "one.ckpt");
  CHECK(bytes == testing::ReadFile(dir / "two.ckpt"));
  CHECK(bytes.substr(0, 5) == "CKPT1");

  testing::WriteFile(dir / "trunc.ckpt", bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(LoadCheckpoint(dir / "trunc.ckpt"), Error);
  testing::WriteFile(dir / "magic.ckpt", "XKPT1" + bytes.substr(5));
  CHECK_THROWS_AS(LoadCheckpoint(dir / "magic.ckpt"), Error);
}

}  // namespace
}  // namespace unicap::nn
