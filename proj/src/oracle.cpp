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

#include "edgesim/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "edgesim/workload.hpp"

namespace edgesim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasibility restated from the allocation invariants, independent of the
// solver helpers.
bool oracle_feasible(const ProblemInstance& inst, std::span<const int> placement) {
  std::vector<int> counts(inst.servers.size(), 0);
  int offloaded = 0;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    const int p = placement[i];
    if (p < 0) continue;
    const ServerSpec& server = inst.servers[static_cast<std::size_t>(p)];
    if (server.kind == ServerKind::Gpu && !inst.tasks[i].special) return false;
    ++counts[static_cast<std::size_t>(p)];
    ++offloaded;
  }
  if (offloaded > inst.bandwidth_units) return false;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const ServerSpec& server = inst.servers[s];
    const int slots = static_cast<int>(std::floor(server.capacity / server.min_alloc + 1e-9));
    if (counts[s] > slots) return false;
  }
  return true;
}

double weighted_cost(const TaskSpec& task, const CostBreakdown& c) {
  return task.alpha * c.tet + task.beta * c.energy;
}

// Minimum weighted cost of one offloaded task over the power grid, at a
// fixed unit count.
double grid_best_cost(const ProblemInstance& inst, const TaskSpec& task,
                      const ServerSpec& server, double share, int units,
                      double step) {
  double best = kInf;
  const double pmin = inst.cost.power_min;
  const double pmax = inst.cost.power_max;
  for (long long j = 0;; ++j) {
    const double p = pmin + static_cast<double>(j) * step;
    if (p >= pmax) break;
    const CostBreakdown c = cost_offload(task, server, share, units, p, inst.cost);
    if (!c.feasible) return kInf;
    const double w = weighted_cost(task, c);
    if (w < best) best = w;
  }
  const CostBreakdown c = cost_offload(task, server, share, units, pmax, inst.cost);
  if (!c.feasible) return kInf;
  const double w = weighted_cost(task, c);
  return w < best ? w : best;
}

// Enumerate compositions of `total` into claims.size() parts >= 1, tracking
// the minimum of the summed per-task costs. costs[c][b-1] is claim c's best
// cost at b units.
void best_over_compositions(const std::vector<std::vector<double>>& costs,
                            std::size_t index, int remaining, double partial,
                            double& best) {
  if (index + 1 == costs.size()) {
    const double total = partial + costs[index][static_cast<std::size_t>(remaining - 1)];
    if (total < best) best = total;
    return;
  }
  const int others = static_cast<int>(costs.size() - index - 1);
  for (int b = 1; remaining - b >= others; ++b) {
    best_over_compositions(costs, index + 1, remaining - b,
                           partial + costs[index][static_cast<std::size_t>(b - 1)], best);
  }
}

}  // namespace

OracleResult exhaustive_solve(const ProblemInstance& instance,
                              double power_step) {
  const std::size_t n = instance.tasks.size();
  const int m = static_cast<int>(instance.servers.size());
  const int budget = instance.bandwidth_units;

  OracleResult out;
  out.objective = kInf;
  std::vector<int> digits(n, 0);
  for (;;) {
    std::vector<int> placement(n);
    for (std::size_t i = 0; i < n; ++i) {
      placement[i] = digits[i] - 1;  // -1 = Local
    }
    ++out.placements;
    if (oracle_feasible(instance, placement)) {
      std::vector<int> counts(instance.servers.size(), 0);
      for (int p : placement) {
        if (p >= 0) ++counts[static_cast<std::size_t>(p)];
      }
      double local_sum = 0.0;
      std::vector<std::size_t> off;
      for (std::size_t i = 0; i < n; ++i) {
        if (placement[i] < 0) {
          local_sum += weighted_cost(instance.tasks[i],
                                     cost_local(instance.tasks[i], instance.cost));
        } else {
          off.push_back(i);
        }
      }
      double candidate = kInf;
      if (off.empty()) {
        candidate = local_sum;
      } else {
        const int k = static_cast<int>(off.size());
        const int max_units_one = budget - (k - 1);
        std::vector<std::vector<double>> costs(off.size());
        for (std::size_t c = 0; c < off.size(); ++c) {
          const std::size_t i = off[c];
          const auto s = static_cast<std::size_t>(placement[i]);
          const ServerSpec& server = instance.servers[s];
          const double share = server.capacity / counts[s];
          costs[c].resize(static_cast<std::size_t>(max_units_one));
          for (int b = 1; b <= max_units_one; ++b) {
            costs[c][static_cast<std::size_t>(b - 1)] = grid_best_cost(
                instance, instance.tasks[i], server, share, b, power_step);
          }
        }
        double best = kInf;
        best_over_compositions(costs, 0, budget, 0.0, best);
        candidate = local_sum + best;
      }
      if (candidate < out.objective) out.objective = candidate;
    }
    std::size_t pos = n;
    while (pos > 0) {
      auto& d = digits[pos - 1];
      if (d < m) {
        ++d;
        break;
      }
      d = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return out;
}

Gradients finite_difference_grads(const NetworkParams& params,
                                  std::span<const DatasetPair> batch,
                                  double step) {
  if (batch.empty()) throw std::invalid_argument("finite_difference_grads: empty batch");
  auto loss = [&](const NetworkParams& p) {
    double total = 0.0;
    for (const DatasetPair& sample : batch) {
      const std::vector<double> y = forward_vector(p, sample.x.values);
      const double d0 = y[0] - sample.y.cpu_demand;
      const double d1 = y[1] - sample.y.gpu_demand;
      const double d2 = y[2] - sample.y.bandwidth_demand;
      total += d0 * d0 + d1 * d1 + d2 * d2;
    }
    return total / static_cast<double>(batch.size());
  };

  NetworkParams work = params;
  Gradients grads;
  grads.weights.resize(params.weights.size());
  grads.biases.resize(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    grads.weights[l].assign(params.weights[l].size(), 0.0);
    grads.biases[l].assign(params.biases[l].size(), 0.0);
    for (std::size_t w = 0; w < params.weights[l].size(); ++w) {
      const double saved = work.weights[l][w];
      work.weights[l][w] = saved + step;
      const double up = loss(work);
      work.weights[l][w] = saved - step;
      const double down = loss(work);
      work.weights[l][w] = saved;
      grads.weights[l][w] = (up - down) / (2.0 * step);
    }
    for (std::size_t b = 0; b < params.biases[l].size(); ++b) {
      const double saved = work.biases[l][b];
      work.biases[l][b] = saved + step;
      const double up = loss(work);
      work.biases[l][b] = saved - step;
      const double down = loss(work);
      work.biases[l][b] = saved;
      grads.biases[l][b] = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

ProblemInstance random_small_instance(Rng& rng,
                                      const SmallInstanceOptions& opts) {
  ProblemInstance inst;
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.max_tasks)));
  const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.max_servers)));
  const int spare = std::max(0, opts.max_units - n);
  const int budget = n + static_cast<int>(rng.below(static_cast<std::uint64_t>(spare + 1)));

  for (int s = 0; s < m; ++s) {
    ServerSpec server;
    server.id = s;
    if (rng.bernoulli(0.5)) {
      server.kind = ServerKind::Gpu;
      server.capacity = rng.uniform(50.0, 150.0);
      server.min_alloc = 1.0;
    } else {
      server.kind = ServerKind::Cpu;
      server.capacity = rng.uniform(4.0, 12.0);
      server.min_alloc = 0.1;
    }
    inst.servers.push_back(server);
  }

  ScenarioConfig scenario;
  scenario.n_tasks = n;
  scenario.bandwidth_units_total = budget;
  inst.tasks = generate_tasks(scenario, rng);
  inst.bandwidth_units = budget;
  return inst;
}

}  // namespace edgesim
