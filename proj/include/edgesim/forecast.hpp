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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

#include "edgesim/workload.hpp"

namespace edgesim {

// Fully connected network: ReLU hidden layers, linear output. weights[l] is
// row-major (layer_sizes[l+1] x layer_sizes[l]). When trained with
// normalization the standardization statistics travel with the parameters so
// inference can invert them.
struct NetworkParams {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> x_mean, x_std, y_mean, y_std;  // empty when disabled

  bool normalized() const { return !x_mean.empty(); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 16;
  std::uint64_t seed = 1234;
  bool normalize = true;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_history;  // full-dataset MSE after each epoch
};

// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases.
NetworkParams init_params(const std::vector<int>& layer_sizes,
                          std::uint64_t seed);

// Raw forward pass: no normalization, no output clamp.
std::vector<double> forward_vector(const NetworkParams& params,
                                   std::span<const double> x);

// Forward pass with the output clamped at zero (demands are non-negative).
// Requires a 3-dimensional output layer.
DemandVector forward(const NetworkParams& params, const FeatureVector& x);

// Mean over samples of the squared error summed across the 3 components.
double mse(std::span<const DemandVector> predictions,
           std::span<const DemandVector> actuals);

// Exact analytic gradients of the batch MSE with respect to every weight and
// bias. The inference-time clamp is not part of the training graph.
Gradients backprop_grads(const NetworkParams& params,
                         std::span<const DatasetPair> batch);

// Mini-batch gradient descent, reshuffled each epoch from cfg.seed. With
// cfg.normalize the dataset is standardized by its own mean/std and the
// statistics are stored in the returned parameters. loss_history holds the
// full-dataset MSE in original units after each epoch.
TrainResult train(NetworkParams params, std::span<const DatasetPair> dataset,
                  const TrainConfig& cfg);

// Standardizes the input if the params carry statistics, runs the network,
// inverts the target scaling and clamps at zero.
DemandVector predict_demand(const NetworkParams& params,
                            const FeatureVector& features);

nlohmann::json network_to_json(const NetworkParams& params);
NetworkParams network_from_json(const nlohmann::json& j);
void save_network(const NetworkParams& params, const std::filesystem::path& file);
NetworkParams load_network(const std::filesystem::path& file);

}  // namespace edgesim
