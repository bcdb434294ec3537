// Copyright 2026 The edgesim Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <vector>

#include "edgesim/forecast.hpp"
#include "edgesim/oracle.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {

NetworkParams zero_network(const std::vector<int>& sizes) {
  NetworkParams p = init_params(sizes, 1);
  for (auto& w : p.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : p.biases) std::fill(b.begin(), b.end(), 0.0);
  return p;
}

NetworkParams identity3() {
  NetworkParams p = zero_network({3, 3});
  p.weights[0] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  return p;
}

std::vector<DatasetPair> linear_dataset(int samples, std::uint64_t seed) {
  // demand = A x for a fixed 3x8 matrix A with non-negative entries.
  const std::vector<double> a{
      1.0, 0.5, 0.0, 0.2, 0.0, 1.5, 0.3, 0.0,
      0.0, 2.0, 1.0, 0.0, 0.7, 0.0, 0.0, 0.4,
      0.3, 0.0, 0.0, 1.2, 0.0, 0.0, 2.0, 1.0,
  };
  Rng rng(seed);
  std::vector<DatasetPair> dataset;
  for (int s = 0; s < samples; ++s) {
    DatasetPair pair;
    pair.x.t = s;
    pair.x.values.resize(8);
    for (double& v : pair.x.values) v = rng.uniform(0.0, 1.0);
    std::vector<double> y(3, 0.0);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 8; ++c) {
        y[static_cast<std::size_t>(r)] +=
            a[static_cast<std::size_t>(r) * 8 + c] * pair.x.values[static_cast<std::size_t>(c)];
      }
    }
    pair.y = {y[0], y[1], y[2]};
    dataset.push_back(std::move(pair));
  }
  return dataset;
}

double max_rel_err(const Gradients& a, const Gradients& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (std::size_t i = 0; i < a.weights[l].size(); ++i) {
      const double x = a.weights[l][i];
      const double y = b.weights[l][i];
      worst = std::max(worst, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-8}));
    }
    for (std::size_t i = 0; i < a.biases[l].size(); ++i) {
      const double x = a.biases[l][i];
      const double y = b.biases[l][i];
      worst = std::max(worst, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-8}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("init_params") {
  SUBCASE("deterministic given the seed") {
    const NetworkParams a = init_params({8, 16, 3}, 42);
    const NetworkParams b = init_params({8, 16, 3}, 42);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
  }
  SUBCASE("biases start at zero, weights inside the Glorot bound") {
    const NetworkParams p = init_params({8, 16, 3}, 7);
    for (const auto& b : p.biases) {
      for (double v : b) CHECK(v == 0.0);
    }
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      const double bound =
          std::sqrt(6.0 / (p.layer_sizes[l] + p.layer_sizes[l + 1]));
      for (double v : p.weights[l]) {
        CHECK(std::abs(v) <= bound);
      }
    }
  }
  SUBCASE("bad shapes are rejected") {
    CHECK_THROWS_AS(init_params({8}, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_params({8, 0, 3}, 1), std::invalid_argument);
  }
}

TEST_CASE("forward") {
  SUBCASE("identity network reproduces its input") {
    const NetworkParams p = identity3();
    FeatureVector x;
    x.values = {1.0, 2.0, 3.0};
    const DemandVector y = forward(p, x);
    CHECK(y.cpu_demand == 1.0);
    CHECK(y.gpu_demand == 2.0);
    CHECK(y.bandwidth_demand == 3.0);
  }
  SUBCASE("output is clamped at zero") {
    const NetworkParams p = identity3();
    FeatureVector x;
    x.values = {5.0, -1.0, 0.0};
    const DemandVector y = forward(p, x);
    CHECK(y.cpu_demand == 5.0);
    CHECK(y.gpu_demand == 0.0);
    CHECK(y.bandwidth_demand == 0.0);
  }
  SUBCASE("all-zero network maps everything to zero") {
    const NetworkParams p = zero_network({4, 6, 3});
    FeatureVector x;
    x.values = {1.0, -2.0, 3.0, 4.0};
    const DemandVector y = forward(p, x);
    CHECK(y.cpu_demand == 0.0);
    CHECK(y.gpu_demand == 0.0);
    CHECK(y.bandwidth_demand == 0.0);
  }
  SUBCASE("hand-evaluated one-hidden-layer composition") {
    NetworkParams p = zero_network({1, 2, 3});
    p.weights[0] = {2.0, -3.0};
    p.biases[0] = {0.5, 1.0};
    // hidden = relu([2.5, -2]) = [2.5, 0]
    p.weights[1] = {1.0, 1.0, 0.5, -1.0, -2.0, 0.0};
    p.biases[1] = {0.1, 0.2, 0.3};
    const std::vector<double> raw = forward_vector(p, std::vector<double>{1.0});
    CHECK(raw[0] == doctest::Approx(2.6));
    CHECK(raw[1] == doctest::Approx(1.45));
    CHECK(raw[2] == doctest::Approx(-4.7));
    FeatureVector x;
    x.values = {1.0};
    const DemandVector y = forward(p, x);
    CHECK(y.bandwidth_demand == 0.0);  // clamp applies
  }
  SUBCASE("dimension mismatch throws") {
    const NetworkParams p = identity3();
    FeatureVector x;
    x.values = {1.0};
    CHECK_THROWS_AS(forward(p, x), std::invalid_argument);
  }
}

TEST_CASE("mse") {
  SUBCASE("zero for identical sequences") {
    const std::vector<DemandVector> v{{1.0, 2.0, 3.0}};
    CHECK(mse(v, v) == 0.0);
  }
  SUBCASE("single sample squared difference") {
    const std::vector<DemandVector> pred{{2.0, 0.0, 0.0}};
    const std::vector<DemandVector> act{{1.0, 0.0, 0.0}};
    CHECK(mse(pred, act) == doctest::Approx(1.0));
  }
  SUBCASE("mean over samples") {
    const std::vector<DemandVector> pred{{1.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    const std::vector<DemandVector> act{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    CHECK(mse(pred, act) == doctest::Approx(2.0));  // (1 + 3) / 2
  }
  SUBCASE("errors") {
    const std::vector<DemandVector> one{{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(mse({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(mse(one, std::vector<DemandVector>{}), std::invalid_argument);
  }
}

TEST_CASE("backprop_grads") {
  SUBCASE("a perfectly fitting network has zero gradients") {
    const NetworkParams p = zero_network({2, 4, 3});
    DatasetPair pair;
    pair.x.values = {1.0, -1.0};
    pair.y = {0.0, 0.0, 0.0};
    const Gradients g = backprop_grads(p, std::vector<DatasetPair>{pair});
    for (const auto& layer : g.weights) {
      for (double v : layer) CHECK(v == 0.0);
    }
    for (const auto& layer : g.biases) {
      for (double v : layer) CHECK(v == 0.0);
    }
  }
  SUBCASE("duplicating a sample does not change the mean gradient") {
    const NetworkParams p = init_params({3, 5, 3}, 21);
    DatasetPair pair;
    pair.x.values = {0.3, -0.7, 1.1};
    pair.y = {1.0, 0.5, 0.25};
    const Gradients once = backprop_grads(p, std::vector<DatasetPair>{pair});
    const Gradients twice = backprop_grads(p, std::vector<DatasetPair>{pair, pair});
    CHECK(max_rel_err(once, twice) < 1e-12);
  }
  SUBCASE("analytic gradients match central finite differences") {
    Rng rng(31);
    for (const auto& shape :
         std::vector<std::vector<int>>{{4, 8, 3}, {5, 12, 6, 3}, {8, 32, 16, 3}}) {
      const NetworkParams p = init_params(shape, rng.next_u64());
      std::vector<DatasetPair> batch;
      for (int s = 0; s < 4; ++s) {
        DatasetPair pair;
        pair.x.values.resize(static_cast<std::size_t>(shape.front()));
        for (double& v : pair.x.values) v = rng.normal(0.0, 1.0);
        pair.y = {rng.normal(0.0, 1.0), rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
        batch.push_back(std::move(pair));
      }
      const Gradients analytic = backprop_grads(p, batch);
      const Gradients numeric = finite_difference_grads(p, batch, 1e-5);
      CHECK(max_rel_err(analytic, numeric) < 1e-4);
    }
  }
  SUBCASE("empty batch throws") {
    const NetworkParams p = identity3();
    CHECK_THROWS_AS(backprop_grads(p, std::vector<DatasetPair>{}), std::invalid_argument);
  }
}

TEST_CASE("train") {
  const std::vector<DatasetPair> dataset = linear_dataset(160, 5);

  SUBCASE("linear demand is learnable: loss drops by 100x") {
    const NetworkParams p0 = init_params({8, 3}, 77);
    std::vector<DemandVector> pred0;
    std::vector<DemandVector> actual;
    for (const auto& pair : dataset) {
      pred0.push_back(predict_demand(p0, pair.x));
      actual.push_back(pair.y);
    }
    const double initial = mse(pred0, actual);
    const TrainResult tr = train(p0, dataset, TrainConfig{});
    CHECK(tr.loss_history.back() <= 0.01 * initial);
  }
  SUBCASE("zero learning rate leaves the parameters untouched") {
    const NetworkParams p0 = init_params({8, 16, 3}, 13);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    const TrainResult tr = train(p0, dataset, cfg);
    CHECK(tr.params.weights == p0.weights);
    CHECK(tr.params.biases == p0.biases);
    for (std::size_t i = 1; i < tr.loss_history.size(); ++i) {
      CHECK(tr.loss_history[i] == tr.loss_history[0]);
    }
  }
  SUBCASE("bit-for-bit deterministic") {
    const NetworkParams p0 = init_params({8, 16, 3}, 13);
    TrainConfig cfg;
    cfg.epochs = 20;
    const TrainResult a = train(p0, dataset, cfg);
    const TrainResult b = train(p0, dataset, cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.params.weights == b.params.weights);
    CHECK(a.params.biases == b.params.biases);
  }
  SUBCASE("loss trend is non-increasing within a 5% band") {
    const NetworkParams p0 = init_params({8, 16, 3}, 13);
    TrainConfig cfg;
    cfg.epochs = 60;
    const TrainResult tr = train(p0, dataset, cfg);
    for (std::size_t i = 1; i < tr.loss_history.size(); ++i) {
      CHECK(tr.loss_history[i] <= tr.loss_history[i - 1] * 1.05);
    }
  }
  SUBCASE("last recorded loss equals the refit error on the training inputs") {
    const NetworkParams p0 = init_params({8, 16, 3}, 13);
    TrainConfig cfg;
    cfg.epochs = 10;
    const TrainResult tr = train(p0, dataset, cfg);
    std::vector<DemandVector> preds;
    std::vector<DemandVector> actual;
    for (const auto& pair : dataset) {
      preds.push_back(predict_demand(tr.params, pair.x));
      actual.push_back(pair.y);
    }
    CHECK(std::abs(mse(preds, actual) - tr.loss_history.back()) < 1e-9);
  }
  SUBCASE("empty dataset throws") {
    NetworkParams p0 = init_params({8, 3}, 1);
    CHECK_THROWS_AS(train(p0, std::vector<DatasetPair>{}, TrainConfig{}),
                    std::invalid_argument);
  }
}

TEST_CASE("predict_demand") {
  SUBCASE("identity network without normalization clamps the raw input") {
    const NetworkParams p = identity3();
    FeatureVector x;
    x.values = {5.0, -2.0, 1.0};
    const DemandVector y = predict_demand(p, x);
    CHECK(y.cpu_demand == 5.0);
    CHECK(y.gpu_demand == 0.0);
    CHECK(y.bandwidth_demand == 1.0);
  }
  SUBCASE("outputs are never negative") {
    Rng rng(3);
    const NetworkParams p = init_params({6, 12, 3}, 4);
    for (int trial = 0; trial < 200; ++trial) {
      FeatureVector x;
      x.values.resize(6);
      for (double& v : x.values) v = rng.normal(0.0, 5.0);
      const DemandVector y = predict_demand(p, x);
      CHECK(y.cpu_demand >= 0.0);
      CHECK(y.gpu_demand >= 0.0);
      CHECK(y.bandwidth_demand >= 0.0);
    }
  }
}

TEST_CASE("network save/load round trip") {
  const std::vector<DatasetPair> dataset = linear_dataset(64, 8);
  TrainConfig cfg;
  cfg.epochs = 5;
  const TrainResult tr = train(init_params({8, 16, 3}, 2), dataset, cfg);

  const auto file = std::filesystem::temp_directory_path() / "edgesim_net_roundtrip.json";
  save_network(tr.params, file);
  const NetworkParams loaded = load_network(file);
  std::filesystem::remove(file);

  CHECK(loaded.layer_sizes == tr.params.layer_sizes);
  CHECK(loaded.weights == tr.params.weights);
  CHECK(loaded.biases == tr.params.biases);
  CHECK(loaded.x_mean == tr.params.x_mean);
  CHECK(loaded.y_std == tr.params.y_std);

  const DemandVector a = predict_demand(tr.params, dataset.front().x);
  const DemandVector b = predict_demand(loaded, dataset.front().x);
  CHECK(a.cpu_demand == b.cpu_demand);
  CHECK(a.gpu_demand == b.gpu_demand);
  CHECK(a.bandwidth_demand == b.bandwidth_demand);
}

TEST_CASE("model json rejects bad input") {
  nlohmann::json j = network_to_json(identity3());
  j["format_version"] = 99;
  CHECK_THROWS_AS(network_from_json(j), std::invalid_argument);
}
