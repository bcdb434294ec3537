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
#include <span>
#include <string>
#include <vector>

#include "edgesim/rng.hpp"
#include "edgesim/sysmodel.hpp"

namespace edgesim {

// One monitoring sample of the background load.
struct RawSample {
  int t = 0;
  double cpu_util = 0.0;  // [0, 1]
  double gpu_util = 0.0;  // [0, 1]
  double net_util = 0.0;  // [0, 1]
  int arrivals = 0;
};

struct FeatureVector {
  std::vector<double> values;
  int t = 0;
};

// Predicted (or actual) background demand per resource type.
struct DemandVector {
  double cpu_demand = 0.0;        // Gcycles/s
  double gpu_demand = 0.0;        // Gcycles/s
  double bandwidth_demand = 0.0;  // units
};

struct ScenarioConfig {
  int n_tasks = 15;
  double special_prob = 0.7;
  double mean_data_bytes = 420000.0;  // 420 KB
  double mean_cycles = 1.0;           // Gcycles
  double sensitivity_low = 0.1;
  double sensitivity_high = 1.0;
  double rate_low = 1e6;   // bit/s per bandwidth unit
  double rate_high = 2e6;
  int bandwidth_units_total = 50;
  std::uint64_t seed = 42;
  int trace_length = 200;
  int window_k = 4;
};

// Task attributes that are scenario-wide constants rather than sampled.
struct TaskGenOptions {
  double alpha = 0.8;
  double beta = 0.2;
  double snr_coeff = 10.0;
  double deadline_min = 0.2;  // tightest deadline, at sensitivity 1
  double deadline_max = 2.0;
};

inline constexpr int kFeatureCount = 8;
inline constexpr int kDiurnalPeriod = 24;

// Samples cfg.n_tasks tasks: special ~ Bernoulli(special_prob), payload and
// cycles ~ Uniform[0.5, 1.5] x mean, sensitivity and per-unit rate uniform
// over their ranges. deadline = deadline_max - sensitivity * (deadline_max -
// deadline_min), so more sensitive tasks get tighter deadlines.
std::vector<TaskSpec> generate_tasks(const ScenarioConfig& cfg, Rng& rng,
                                     const TaskGenOptions& opts = {});

// Synthetic utilization trace: each channel is a period-24 sinusoid around
// 0.5 with Gaussian noise, clamped to [0, 1]; arrivals ~ Poisson(n_tasks/4).
std::vector<RawSample> generate_trace(const ScenarioConfig& cfg, Rng& rng,
                                      double noise_sigma = 0.05);

// Mean of the last k entries. Throws when k < 1 or k > series length.
double moving_average(std::span<const double> series, int k);

// Features at time t: the four raw channels, a window-k moving average of
// each utilization channel, and the position within the diurnal cycle scaled
// to [0, 1). Throws when t < k - 1 (not enough history).
FeatureVector extract_features(std::span<const RawSample> trace, int t, int k);

struct DatasetPair {
  FeatureVector x;
  DemandVector y;
};

// Supervised pairs (features at t, demand at t+1) for t in [k-1, len-2].
// Demand targets scale the next-step utilizations by the given pool totals.
std::vector<DatasetPair> build_dataset(std::span<const RawSample> trace, int k,
                                       const ScenarioConfig& cfg,
                                       double total_cpu_capacity = 45.0,
                                       double total_gpu_capacity = 500.0);

std::string trace_to_csv(std::span<const RawSample> trace);
std::string dataset_to_csv(std::span<const DatasetPair> dataset);

}  // namespace edgesim
