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

#include "edgesim/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "edgesim/kernels.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {
namespace {

constexpr int kFormatVersion = 1;
constexpr int kDemandDims = 3;

void check_shapes(const NetworkParams& p) {
  if (p.layer_sizes.size() < 2) {
    throw std::invalid_argument("network needs at least input and output layers");
  }
  for (int s : p.layer_sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be >= 1");
  }
  const std::size_t layers = p.layer_sizes.size() - 1;
  if (p.weights.size() != layers || p.biases.size() != layers) {
    throw std::invalid_argument("weight/bias layer count mismatch");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const auto rows = static_cast<std::size_t>(p.layer_sizes[l + 1]);
    const auto cols = static_cast<std::size_t>(p.layer_sizes[l]);
    if (p.weights[l].size() != rows * cols || p.biases[l].size() != rows) {
      throw std::invalid_argument("weight/bias shape mismatch at layer " + std::to_string(l));
    }
  }
}

std::vector<double> to_vec(const DemandVector& d) {
  return {d.cpu_demand, d.gpu_demand, d.bandwidth_demand};
}

DemandVector to_demand(std::span<const double> v) {
  return {v[0], v[1], v[2]};
}

// Activations and pre-activations of one forward pass, kept for backprop.
struct ForwardTrace {
  std::vector<std::vector<double>> acts;  // acts[0] = input, size layers+1
  std::vector<std::vector<double>> pre;   // pre[l] = W_l a_l + b_l
};

ForwardTrace run_forward(const NetworkParams& p, std::span<const double> x) {
  const auto& ops = kernels::active();
  const std::size_t layers = p.layer_sizes.size() - 1;
  ForwardTrace tr;
  tr.acts.resize(layers + 1);
  tr.pre.resize(layers);
  tr.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const auto rows = static_cast<std::size_t>(p.layer_sizes[l + 1]);
    const auto cols = static_cast<std::size_t>(p.layer_sizes[l]);
    auto& z = tr.pre[l];
    z.resize(rows);
    ops.matvec(p.weights[l].data(), tr.acts[l].data(), z.data(), rows, cols);
    ops.axpy(1.0, p.biases[l].data(), z.data(), rows);
    auto& a = tr.acts[l + 1];
    a.resize(rows);
    if (l != layers - 1) {
      ops.relu(z.data(), a.data(), rows);
    } else {
      a = z;  // linear output layer
    }
  }
  return tr;
}

Gradients zero_grads(const NetworkParams& p) {
  Gradients g;
  g.weights.resize(p.weights.size());
  g.biases.resize(p.biases.size());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    g.weights[l].assign(p.weights[l].size(), 0.0);
    g.biases[l].assign(p.biases[l].size(), 0.0);
  }
  return g;
}

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> std;
};

ColumnStats column_stats(const std::vector<std::vector<double>>& rows) {
  const std::size_t dims = rows.front().size();
  const double n = static_cast<double>(rows.size());
  ColumnStats st;
  st.mean.assign(dims, 0.0);
  st.std.assign(dims, 0.0);
  for (const auto& r : rows) {
    for (std::size_t d = 0; d < dims; ++d) st.mean[d] += r[d];
  }
  for (std::size_t d = 0; d < dims; ++d) st.mean[d] /= n;
  for (const auto& r : rows) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = r[d] - st.mean[d];
      st.std[d] += diff * diff;
    }
  }
  for (std::size_t d = 0; d < dims; ++d) {
    st.std[d] = std::sqrt(st.std[d] / n);
    if (st.std[d] < 1e-12) st.std[d] = 1.0;  // constant column
  }
  return st;
}

}  // namespace

NetworkParams init_params(const std::vector<int>& layer_sizes,
                          std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("init_params: need at least 2 layer sizes");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("init_params: layer sizes must be >= 1");
  }
  NetworkParams p;
  p.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& v : w) v = rng.uniform(-s, s);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return p;
}

std::vector<double> forward_vector(const NetworkParams& params,
                                   std::span<const double> x) {
  check_shapes(params);
  if (static_cast<int>(x.size()) != params.input_size()) {
    throw std::invalid_argument("forward: input has " + std::to_string(x.size()) +
                                " values, expected " + std::to_string(params.input_size()));
  }
  return run_forward(params, x).acts.back();
}

DemandVector forward(const NetworkParams& params, const FeatureVector& x) {
  if (params.layer_sizes.back() != kDemandDims) {
    throw std::invalid_argument("forward: output layer must have 3 units");
  }
  std::vector<double> y = forward_vector(params, x.values);
  for (double& v : y) v = std::max(v, 0.0);
  return to_demand(y);
}

double mse(std::span<const DemandVector> predictions,
           std::span<const DemandVector> actuals) {
  if (predictions.empty() || predictions.size() != actuals.size()) {
    throw std::invalid_argument("mse: sequences must be non-empty and equal length");
  }
  std::vector<double> a;
  std::vector<double> b;
  a.reserve(predictions.size() * kDemandDims);
  b.reserve(predictions.size() * kDemandDims);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    a.push_back(predictions[i].cpu_demand);
    a.push_back(predictions[i].gpu_demand);
    a.push_back(predictions[i].bandwidth_demand);
    b.push_back(actuals[i].cpu_demand);
    b.push_back(actuals[i].gpu_demand);
    b.push_back(actuals[i].bandwidth_demand);
  }
  return kernels::active().sum_sq_diff(a.data(), b.data(), a.size()) /
         static_cast<double>(predictions.size());
}

Gradients backprop_grads(const NetworkParams& params,
                         std::span<const DatasetPair> batch) {
  check_shapes(params);
  if (batch.empty()) throw std::invalid_argument("backprop_grads: empty batch");
  if (params.layer_sizes.back() != kDemandDims) {
    throw std::invalid_argument("backprop_grads: output layer must have 3 units");
  }
  const auto& ops = kernels::active();
  const std::size_t layers = params.layer_sizes.size() - 1;
  Gradients grads = zero_grads(params);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<double> delta;
  std::vector<double> propagated;
  for (const DatasetPair& sample : batch) {
    if (static_cast<int>(sample.x.values.size()) != params.input_size()) {
      throw std::invalid_argument("backprop_grads: sample dimension mismatch");
    }
    const ForwardTrace tr = run_forward(params, sample.x.values);
    const std::vector<double> target = to_vec(sample.y);

    // d(batch MSE)/d(output) = 2 (y_hat - y) / batch
    delta.resize(kDemandDims);
    for (int d = 0; d < kDemandDims; ++d) {
      delta[static_cast<std::size_t>(d)] =
          2.0 * inv_batch * (tr.acts.back()[static_cast<std::size_t>(d)] - target[static_cast<std::size_t>(d)]);
    }

    for (std::size_t l = layers; l-- > 0;) {
      const auto rows = static_cast<std::size_t>(params.layer_sizes[l + 1]);
      const auto cols = static_cast<std::size_t>(params.layer_sizes[l]);
      for (std::size_t r = 0; r < rows; ++r) {
        ops.axpy(delta[r], tr.acts[l].data(), grads.weights[l].data() + r * cols, cols);
      }
      ops.axpy(1.0, delta.data(), grads.biases[l].data(), rows);
      if (l > 0) {
        propagated.resize(cols);
        ops.matvec_t(params.weights[l].data(), delta.data(), propagated.data(), rows, cols);
        delta.resize(cols);
        ops.relu_mask(tr.pre[l - 1].data(), propagated.data(), delta.data(), cols);
      }
    }
  }
  return grads;
}

TrainResult train(NetworkParams params, std::span<const DatasetPair> dataset,
                  const TrainConfig& cfg) {
  check_shapes(params);
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.learning_rate < 0.0) {
    throw std::invalid_argument("train: learning_rate must be >= 0");
  }
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw std::invalid_argument("train: epochs and batch_size must be >= 1");
  }
  const auto& ops = kernels::active();

  // Standardize a working copy; statistics ride along in params.
  std::vector<DatasetPair> work(dataset.begin(), dataset.end());
  if (cfg.normalize) {
    std::vector<std::vector<double>> xs;
    std::vector<std::vector<double>> ys;
    xs.reserve(work.size());
    ys.reserve(work.size());
    for (const auto& pair : work) {
      xs.push_back(pair.x.values);
      ys.push_back(to_vec(pair.y));
    }
    const ColumnStats xstat = column_stats(xs);
    const ColumnStats ystat = column_stats(ys);
    params.x_mean = xstat.mean;
    params.x_std = xstat.std;
    params.y_mean = ystat.mean;
    params.y_std = ystat.std;
    for (auto& pair : work) {
      for (std::size_t d = 0; d < pair.x.values.size(); ++d) {
        pair.x.values[d] = (pair.x.values[d] - xstat.mean[d]) / xstat.std[d];
      }
      std::vector<double> y = to_vec(pair.y);
      for (std::size_t d = 0; d < y.size(); ++d) y[d] = (y[d] - ystat.mean[d]) / ystat.std[d];
      pair.y = to_demand(y);
    }
  } else {
    params.x_mean.clear();
    params.x_std.clear();
    params.y_mean.clear();
    params.y_std.clear();
  }

  std::vector<DemandVector> actuals;
  actuals.reserve(dataset.size());
  for (const auto& pair : dataset) actuals.push_back(pair.y);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(work.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
  std::vector<DatasetPair> batch;
  std::vector<DemandVector> preds(dataset.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(work[order[i]]);
      const Gradients grads = backprop_grads(params, batch);
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        ops.axpy(-cfg.learning_rate, grads.weights[l].data(),
                 params.weights[l].data(), params.weights[l].size());
        ops.axpy(-cfg.learning_rate, grads.biases[l].data(),
                 params.biases[l].data(), params.biases[l].size());
      }
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      preds[i] = predict_demand(params, dataset[i].x);
    }
    result.loss_history.push_back(mse(preds, actuals));
  }
  result.params = std::move(params);
  return result;
}

DemandVector predict_demand(const NetworkParams& params,
                            const FeatureVector& features) {
  if (params.layer_sizes.back() != kDemandDims) {
    throw std::invalid_argument("predict_demand: output layer must have 3 units");
  }
  std::vector<double> x = features.values;
  if (params.normalized()) {
    if (x.size() != params.x_mean.size()) {
      throw std::invalid_argument("predict_demand: input dimension mismatch");
    }
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = (x[d] - params.x_mean[d]) / params.x_std[d];
    }
  }
  std::vector<double> y = forward_vector(params, x);
  if (params.normalized()) {
    for (std::size_t d = 0; d < y.size(); ++d) {
      y[d] = y[d] * params.y_std[d] + params.y_mean[d];
    }
  }
  for (double& v : y) v = std::max(v, 0.0);
  return to_demand(y);
}

nlohmann::json network_to_json(const NetworkParams& params) {
  check_shapes(params);
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["layer_sizes"] = params.layer_sizes;
  j["weights"] = params.weights;
  j["biases"] = params.biases;
  if (params.normalized()) {
    j["normalization"] = {{"x_mean", params.x_mean},
                          {"x_std", params.x_std},
                          {"y_mean", params.y_mean},
                          {"y_std", params.y_std}};
  } else {
    j["normalization"] = nullptr;
  }
  return j;
}

NetworkParams network_from_json(const nlohmann::json& j) {
  if (j.value("format_version", -1) != kFormatVersion) {
    throw std::invalid_argument("network JSON: unsupported format_version");
  }
  NetworkParams p;
  j.at("layer_sizes").get_to(p.layer_sizes);
  j.at("weights").get_to(p.weights);
  j.at("biases").get_to(p.biases);
  if (j.contains("normalization") && !j.at("normalization").is_null()) {
    const auto& n = j.at("normalization");
    n.at("x_mean").get_to(p.x_mean);
    n.at("x_std").get_to(p.x_std);
    n.at("y_mean").get_to(p.y_mean);
    n.at("y_std").get_to(p.y_std);
  }
  check_shapes(p);
  for (const auto& w : p.weights) {
    for (double v : w) {
      if (!std::isfinite(v)) throw std::invalid_argument("network JSON: non-finite weight");
    }
  }
  return p;
}

void save_network(const NetworkParams& params, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << network_to_json(params).dump(2) << '\n';
}

NetworkParams load_network(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  nlohmann::json j;
  in >> j;
  return network_from_json(j);
}

}  // namespace edgesim
