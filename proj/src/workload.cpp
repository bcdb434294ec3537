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

#include "edgesim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "edgesim/format.hpp"
#include "edgesim/kernels.hpp"

namespace edgesim {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<TaskSpec> generate_tasks(const ScenarioConfig& cfg, Rng& rng,
                                     const TaskGenOptions& opts) {
  if (cfg.n_tasks < 0) throw std::invalid_argument("n_tasks must be >= 0");
  if (cfg.special_prob < 0.0 || cfg.special_prob > 1.0)
    throw std::invalid_argument("special_prob must be in [0, 1]");
  if (cfg.sensitivity_low > cfg.sensitivity_high || cfg.rate_low > cfg.rate_high)
    throw std::invalid_argument("scenario ranges must be ordered low <= high");

  std::vector<TaskSpec> tasks;
  tasks.reserve(static_cast<std::size_t>(cfg.n_tasks));
  for (int i = 0; i < cfg.n_tasks; ++i) {
    TaskSpec task;
    task.id = i;
    task.special = rng.bernoulli(cfg.special_prob);
    task.data_bytes = rng.uniform(0.5, 1.5) * cfg.mean_data_bytes;
    task.cycles = rng.uniform(0.5, 1.5) * cfg.mean_cycles;
    task.sensitivity = rng.uniform(cfg.sensitivity_low, cfg.sensitivity_high);
    task.unit_bandwidth_rate = rng.uniform(cfg.rate_low, cfg.rate_high);
    task.deadline = opts.deadline_max -
                    task.sensitivity * (opts.deadline_max - opts.deadline_min);
    task.alpha = opts.alpha;
    task.beta = opts.beta;
    task.snr_coeff = opts.snr_coeff;
    validate(task);
    tasks.push_back(task);
  }
  return tasks;
}

std::vector<RawSample> generate_trace(const ScenarioConfig& cfg, Rng& rng,
                                      double noise_sigma) {
  if (cfg.trace_length < 1) throw std::invalid_argument("trace_length must be >= 1");
  const double lambda = static_cast<double>(cfg.n_tasks) / 4.0;
  std::vector<RawSample> trace;
  trace.reserve(static_cast<std::size_t>(cfg.trace_length));
  for (int t = 0; t < cfg.trace_length; ++t) {
    const double base =
        0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * t / kDiurnalPeriod);
    RawSample s;
    s.t = t;
    s.cpu_util = clamp01(base + rng.normal(0.0, noise_sigma));
    s.gpu_util = clamp01(base + rng.normal(0.0, noise_sigma));
    s.net_util = clamp01(base + rng.normal(0.0, noise_sigma));
    s.arrivals = lambda > 0.0 ? rng.poisson(lambda) : 0;
    trace.push_back(s);
  }
  return trace;
}

double moving_average(std::span<const double> series, int k) {
  if (k < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  if (static_cast<std::size_t>(k) > series.size()) {
    throw std::invalid_argument("moving_average: window exceeds series length");
  }
  const double* tail = series.data() + series.size() - static_cast<std::size_t>(k);
  return kernels::active().reduce_add(tail, static_cast<std::size_t>(k)) / k;
}

FeatureVector extract_features(std::span<const RawSample> trace, int t, int k) {
  if (k < 1) throw std::invalid_argument("extract_features: window must be >= 1");
  if (t < k - 1 || static_cast<std::size_t>(t) >= trace.size()) {
    throw std::invalid_argument("extract_features: not enough history at t=" +
                                std::to_string(t) + " for window " + std::to_string(k));
  }
  std::vector<double> cpu(static_cast<std::size_t>(k));
  std::vector<double> gpu(static_cast<std::size_t>(k));
  std::vector<double> net(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const RawSample& s = trace[static_cast<std::size_t>(t - k + 1 + i)];
    cpu[static_cast<std::size_t>(i)] = s.cpu_util;
    gpu[static_cast<std::size_t>(i)] = s.gpu_util;
    net[static_cast<std::size_t>(i)] = s.net_util;
  }
  const RawSample& now = trace[static_cast<std::size_t>(t)];
  FeatureVector out;
  out.t = t;
  out.values = {
      now.cpu_util,
      now.gpu_util,
      now.net_util,
      static_cast<double>(now.arrivals),
      moving_average(cpu, k),
      moving_average(gpu, k),
      moving_average(net, k),
      static_cast<double>(t % kDiurnalPeriod) / kDiurnalPeriod,
  };
  return out;
}

std::vector<DatasetPair> build_dataset(std::span<const RawSample> trace, int k,
                                       const ScenarioConfig& cfg,
                                       double total_cpu_capacity,
                                       double total_gpu_capacity) {
  if (k < 1) throw std::invalid_argument("build_dataset: window must be >= 1");
  if (trace.size() < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("build_dataset: trace shorter than window + 1");
  }
  std::vector<DatasetPair> dataset;
  dataset.reserve(trace.size() - static_cast<std::size_t>(k));
  for (int t = k - 1; t + 1 < static_cast<int>(trace.size()); ++t) {
    const RawSample& next = trace[static_cast<std::size_t>(t + 1)];
    DatasetPair pair;
    pair.x = extract_features(trace, t, k);
    pair.y.cpu_demand = next.cpu_util * total_cpu_capacity;
    pair.y.gpu_demand = next.gpu_util * total_gpu_capacity;
    pair.y.bandwidth_demand = next.net_util * cfg.bandwidth_units_total;
    dataset.push_back(std::move(pair));
  }
  return dataset;
}

std::string trace_to_csv(std::span<const RawSample> trace) {
  std::ostringstream out;
  out << "t,cpu_util,gpu_util,net_util,arrivals\n";
  for (const RawSample& s : trace) {
    out << s.t << ',' << format_double(s.cpu_util) << ','
        << format_double(s.gpu_util) << ',' << format_double(s.net_util) << ','
        << s.arrivals << '\n';
  }
  return out.str();
}

std::string dataset_to_csv(std::span<const DatasetPair> dataset) {
  std::ostringstream out;
  out << "t";
  for (int j = 0; j < kFeatureCount; ++j) out << ",x" << j;
  out << ",cpu_demand,gpu_demand,bandwidth_demand\n";
  for (const DatasetPair& pair : dataset) {
    out << pair.x.t;
    for (double v : pair.x.values) out << ',' << format_double(v);
    out << ',' << format_double(pair.y.cpu_demand) << ','
        << format_double(pair.y.gpu_demand) << ','
        << format_double(pair.y.bandwidth_demand) << '\n';
  }
  return out.str();
}

}  // namespace edgesim
