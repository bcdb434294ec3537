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

#include "edgesim/sysmodel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edgesim {
namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

void validate(const TaskSpec& task) {
  if (!(task.cycles > 0.0)) fail("task " + std::to_string(task.id) + ": cycles must be > 0");
  if (!(task.data_bytes >= 0.0)) fail("task " + std::to_string(task.id) + ": data_bytes must be >= 0");
  if (!(task.sensitivity > 0.0 && task.sensitivity <= 1.0))
    fail("task " + std::to_string(task.id) + ": sensitivity must be in (0, 1]");
  if (!(task.deadline > 0.0)) fail("task " + std::to_string(task.id) + ": deadline must be > 0");
  if (!(task.alpha >= 0.0 && task.beta >= 0.0 && task.alpha + task.beta > 0.0))
    fail("task " + std::to_string(task.id) + ": weights must be >= 0 and not both zero");
  if (!(task.unit_bandwidth_rate > 0.0))
    fail("task " + std::to_string(task.id) + ": unit_bandwidth_rate must be > 0");
  if (!(task.snr_coeff > 0.0)) fail("task " + std::to_string(task.id) + ": snr_coeff must be > 0");
}

void validate(const ServerSpec& server) {
  if (!(server.capacity > 0.0)) fail("server " + std::to_string(server.id) + ": capacity must be > 0");
  if (!(server.min_alloc > 0.0)) fail("server " + std::to_string(server.id) + ": min_alloc must be > 0");
  if (server.min_alloc > server.capacity)
    fail("server " + std::to_string(server.id) + ": min_alloc exceeds capacity");
}

void validate(const CostParams& params) {
  if (!(params.local_capacity > 0.0)) fail("cost params: local_capacity must be > 0");
  if (!(params.kappa > 0.0)) fail("cost params: kappa must be > 0");
  if (!(params.gpu_special_efficiency > 0.0 && params.gpu_special_efficiency <= 1.0))
    fail("cost params: gpu_special_efficiency must be in (0, 1]");
  if (!(params.power_min > 0.0 && params.power_min <= params.power_max))
    fail("cost params: power bounds must satisfy 0 < power_min <= power_max");
}

std::optional<double> effective_rate(const ServerSpec& server,
                                     const TaskSpec& task,
                                     const CostParams& params, double share) {
  if (share < server.min_alloc - kShareSlack || share > server.capacity + kShareSlack) {
    fail("share " + std::to_string(share) + " outside [min_alloc, capacity] of server " +
         std::to_string(server.id));
  }
  if (server.kind == ServerKind::Cpu) return share;
  if (!task.special) return std::nullopt;  // common tasks are CPU-only
  return params.gpu_special_efficiency * share;
}

double uplink_rate(const TaskSpec& task, int units, double power,
                   const CostParams& params) {
  if (units < 0) fail("units must be >= 0");
  if (power < params.power_min || power > params.power_max) {
    fail("power " + std::to_string(power) + " outside [" +
         std::to_string(params.power_min) + ", " + std::to_string(params.power_max) + "]");
  }
  if (units == 0) return 0.0;
  return static_cast<double>(units) * task.unit_bandwidth_rate *
         std::log2(1.0 + task.snr_coeff * power);
}

CostBreakdown cost_local(const TaskSpec& task, const CostParams& params) {
  CostBreakdown out;
  out.tx_time = 0.0;
  out.exec_time = task.cycles / params.local_capacity;
  out.tet = out.exec_time;
  const double cycles_abs = task.cycles * 1e9;
  const double freq_abs = params.local_capacity * 1e9;
  out.energy = params.kappa * cycles_abs * freq_abs * freq_abs;
  out.feasible = true;
  return out;
}

CostBreakdown cost_offload(const TaskSpec& task, const ServerSpec& server,
                           double share, int units, double power,
                           const CostParams& params) {
  const auto rate = effective_rate(server, task, params, share);
  CostBreakdown out;
  if (!rate.has_value()) {
    out.feasible = false;
    return out;
  }
  if (units == 0 && task.data_bytes > 0.0) {
    // No bandwidth but a payload to move: infeasible rather than a division
    // by zero.
    out.feasible = false;
    return out;
  }
  if (task.data_bytes > 0.0) {
    out.tx_time = 8.0 * task.data_bytes / uplink_rate(task, units, power, params);
  } else {
    out.tx_time = 0.0;
  }
  out.exec_time = task.cycles / *rate;
  out.tet = out.tx_time + out.exec_time;
  out.energy = power * out.tx_time;
  out.feasible = true;
  return out;
}

double utility(std::span<const TaskSpec> tasks,
               std::span<const CostBreakdown> costs) {
  if (tasks.size() != costs.size()) {
    fail("utility: " + std::to_string(tasks.size()) + " tasks vs " +
         std::to_string(costs.size()) + " cost entries");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!costs[i].feasible) {
      fail("utility: infeasible cost for task " + std::to_string(tasks[i].id));
    }
    total += tasks[i].alpha * costs[i].tet + tasks[i].beta * costs[i].energy;
  }
  return total;
}

}  // namespace edgesim
