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

#include <optional>
#include <span>
#include <vector>

namespace edgesim {

enum class ServerKind { Cpu, Gpu };

// One user task. Compute demand is in Gcycles, rates in Gcycles/s, payload
// in bytes (1 byte = 8 bits, 1 KB = 1000 bytes throughout).
struct TaskSpec {
  int id = 0;
  double data_bytes = 0.0;
  double cycles = 1.0;     // Gcycles
  bool special = false;    // GPU-eligible
  double sensitivity = 1.0;  // latency sensitivity, (0, 1]
  double deadline = 1.0;     // seconds
  double alpha = 0.8;        // delay weight
  double beta = 0.2;         // energy weight
  double unit_bandwidth_rate = 1e6;  // bit/s per bandwidth unit (w0)
  double snr_coeff = 10.0;           // 1/W, channel gain-to-noise coefficient
};

struct ServerSpec {
  int id = 0;
  ServerKind kind = ServerKind::Cpu;
  double capacity = 9.0;   // Gcycles/s
  double min_alloc = 0.1;  // Gcycles/s floor per hosted task
};

struct CostParams {
  double local_capacity = 1.0;  // Gcycles/s on the user device
  double kappa = 1e-27;         // J*s^2/cycle^3, local dynamic-power coefficient
  double gpu_special_efficiency = 0.2;
  double power_min = 0.01;  // W
  double power_max = 1.0;   // W
};

struct CostBreakdown {
  double tx_time = 0.0;    // s
  double exec_time = 0.0;  // s
  double tet = 0.0;        // s, tx_time + exec_time
  double energy = 0.0;     // J, user-side only
  bool feasible = true;
};

// Slack used when comparing compute shares against min_alloc so that
// split-then-check round trips survive floating point.
inline constexpr double kShareSlack = 1e-9;

// Throw std::invalid_argument when a field violates its range.
void validate(const TaskSpec& task);
void validate(const ServerSpec& server);
void validate(const CostParams& params);

// Rate a task extracts from `share` Gcycles/s of `server`. CPU serves any
// task at the full share; GPU serves special tasks at
// gpu_special_efficiency * share and cannot run common tasks (nullopt).
// `share` outside [min_alloc, capacity] throws.
std::optional<double> effective_rate(const ServerSpec& server,
                                     const TaskSpec& task,
                                     const CostParams& params, double share);

// units * w0 * log2(1 + snr_coeff * power) bit/s; zero when units == 0.
// Power outside [power_min, power_max] or negative units throws.
double uplink_rate(const TaskSpec& task, int units, double power,
                   const CostParams& params);

// Local execution: no transmission, energy = kappa * C * f^2.
CostBreakdown cost_local(const TaskSpec& task, const CostParams& params);

// Offloaded execution: upload then execute; energy is transmit energy only
// (result download is neglected). Returns feasible == false for a common
// task on a GPU server and for units == 0 with a non-empty payload.
CostBreakdown cost_offload(const TaskSpec& task, const ServerSpec& server,
                           double share, int units, double power,
                           const CostParams& params);

// Sum of alpha_i * tet_i + beta_i * energy_i. Throws on length mismatch or
// any infeasible entry, naming the offending task.
double utility(std::span<const TaskSpec> tasks,
               std::span<const CostBreakdown> costs);

}  // namespace edgesim
