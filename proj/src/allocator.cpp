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

#include "edgesim/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "edgesim/golden_section.hpp"

namespace edgesim {
namespace {

// Sentinel for tasks not yet placed during greedy construction.
constexpr int kUnplaced = -2;

constexpr double kPowerTol = 1e-6;  // W, golden-section bracket width

std::vector<int> hosted_counts(const ProblemInstance& instance,
                               std::span<const int> placement) {
  std::vector<int> counts(instance.servers.size(), 0);
  for (int p : placement) {
    if (p >= 0) ++counts[static_cast<std::size_t>(p)];
  }
  return counts;
}

bool kind_compatible(const TaskSpec& task, const ServerSpec& server) {
  return server.kind == ServerKind::Cpu || task.special;
}

// Feasibility of a (possibly partial) placement vector: per-server slot
// limits, kind compatibility, and one bandwidth unit available per offloaded
// task.
bool placement_feasible(const ProblemInstance& instance,
                        std::span<const int> placement) {
  std::vector<int> counts(instance.servers.size(), 0);
  int offloaded = 0;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    const int p = placement[i];
    if (p == kUnplaced || p == TaskAssignment::kLocal) continue;
    if (p < 0 || static_cast<std::size_t>(p) >= instance.servers.size()) return false;
    if (!kind_compatible(instance.tasks[i], instance.servers[static_cast<std::size_t>(p)])) {
      return false;
    }
    ++counts[static_cast<std::size_t>(p)];
    ++offloaded;
  }
  if (offloaded > instance.bandwidth_units) return false;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] > max_hosted(instance.servers[s])) return false;
  }
  return true;
}

// The power optimum of alpha*(t_tx + t_exec) + beta*p*t_tx does not depend
// on the compute share or the unit count: both only scale the p-dependent
// term by a positive constant or shift it. Solvers therefore optimize each
// task's power once and reuse it across placements.
struct PowerCache {
  explicit PowerCache(std::size_t n) : values(n) {}
  std::vector<std::optional<double>> values;
};

// A completed (partial) placement: powers, bandwidth and costs filled in.
// Unplaced tasks carry no cost and consume nothing.
struct Completion {
  Allocation alloc;
  std::vector<CostBreakdown> costs;
  double objective = 0.0;
};

Completion complete_placement(const ProblemInstance& instance,
                              std::span<const int> placement,
                              PowerCache& power_cache) {
  const std::size_t n = instance.tasks.size();
  const std::vector<int> counts = hosted_counts(instance, placement);

  Completion out;
  out.alloc.tasks.assign(n, TaskAssignment{});
  out.costs.assign(n, CostBreakdown{});

  std::vector<BandwidthClaim> claims;
  std::vector<std::size_t> claim_tasks;
  for (std::size_t i = 0; i < n; ++i) {
    if (placement[i] < 0) continue;
    const auto s = static_cast<std::size_t>(placement[i]);
    const ServerSpec& server = instance.servers[s];
    const double share = server.capacity / counts[s];
    auto& cached = power_cache.values[i];
    if (!cached.has_value()) {
      cached = optimize_power(instance.tasks[i], server, share, 1, instance.cost);
    }
    claims.push_back({static_cast<int>(i), *cached});
    claim_tasks.push_back(i);
  }

  std::vector<int> units;
  if (!claims.empty()) {
    units = allocate_bandwidth(instance, claims, instance.bandwidth_units);
  }

  for (std::size_t c = 0; c < claims.size(); ++c) {
    const std::size_t i = claim_tasks[c];
    auto& a = out.alloc.tasks[i];
    a.server = placement[i];
    a.units = units[c];
    a.power = claims[c].power;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const int p = placement[i];
    if (p == kUnplaced) continue;
    if (p == TaskAssignment::kLocal) {
      out.costs[i] = cost_local(instance.tasks[i], instance.cost);
    } else {
      const auto s = static_cast<std::size_t>(p);
      const ServerSpec& server = instance.servers[s];
      const double share = server.capacity / counts[s];
      out.costs[i] = cost_offload(instance.tasks[i], server, share,
                                  out.alloc.tasks[i].units,
                                  out.alloc.tasks[i].power, instance.cost);
    }
    out.objective += instance.tasks[i].alpha * out.costs[i].tet +
                     instance.tasks[i].beta * out.costs[i].energy;
  }
  return out;
}

SolveResult result_from_completion(const ProblemInstance& instance,
                                   Completion&& comp, Method method,
                                   long long iterations,
                                   std::vector<double> trace) {
  SolveResult r;
  r.allocation = std::move(comp.alloc);
  r.per_task_costs = std::move(comp.costs);
  r.objective = utility(instance.tasks, r.per_task_costs);
  r.method = method;
  r.iterations = iterations;
  r.objective_trace = std::move(trace);
  return r;
}

// Every task offloaded to the server giving it the highest effective rate
// under the loads accumulated so far (in task id order); Local when no
// compatible server slot or bandwidth unit remains.
std::vector<int> fastest_server_placement(const ProblemInstance& instance) {
  const std::size_t n = instance.tasks.size();
  std::vector<int> placement(n, TaskAssignment::kLocal);
  std::vector<int> counts(instance.servers.size(), 0);
  int offloaded = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (offloaded >= instance.bandwidth_units) continue;
    int best_server = TaskAssignment::kLocal;
    double best_rate = 0.0;
    for (std::size_t s = 0; s < instance.servers.size(); ++s) {
      const ServerSpec& server = instance.servers[s];
      if (!kind_compatible(instance.tasks[i], server)) continue;
      if (counts[s] + 1 > max_hosted(server)) continue;
      const double share = server.capacity / (counts[s] + 1);
      const auto rate = effective_rate(server, instance.tasks[i], instance.cost, share);
      if (rate.has_value() && *rate > best_rate) {
        best_rate = *rate;
        best_server = static_cast<int>(s);
      }
    }
    if (best_server != TaskAssignment::kLocal) {
      placement[i] = best_server;
      ++counts[static_cast<std::size_t>(best_server)];
      ++offloaded;
    }
  }
  return placement;
}

struct SearchOutcome {
  Completion comp;
  std::vector<double> trace;
  long long accepted = 0;
};

// Best-improvement local search over single-task moves and pairwise swaps.
SearchOutcome local_search(const ProblemInstance& instance,
                           std::vector<int> placement, PowerCache& cache,
                           int max_iters) {
  const int n = static_cast<int>(instance.tasks.size());
  const int m = static_cast<int>(instance.servers.size());
  SearchOutcome out;
  out.comp = complete_placement(instance, placement, cache);
  out.trace.push_back(out.comp.objective);

  std::vector<int> candidate;
  while (out.accepted < max_iters) {
    double best_obj = out.comp.objective;
    std::vector<int> best_placement;
    Completion best_comp;

    auto consider = [&](const std::vector<int>& cand) {
      if (!placement_feasible(instance, cand)) return;
      Completion comp = complete_placement(instance, cand, cache);
      if (comp.objective < best_obj) {
        best_obj = comp.objective;
        best_placement = cand;
        best_comp = std::move(comp);
      }
    };

    for (int i = 0; i < n; ++i) {
      for (int v = TaskAssignment::kLocal; v < m; ++v) {
        if (v == placement[static_cast<std::size_t>(i)]) continue;
        candidate = placement;
        candidate[static_cast<std::size_t>(i)] = v;
        consider(candidate);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (placement[static_cast<std::size_t>(i)] == placement[static_cast<std::size_t>(j)]) continue;
        candidate = placement;
        std::swap(candidate[static_cast<std::size_t>(i)], candidate[static_cast<std::size_t>(j)]);
        consider(candidate);
      }
    }

    if (best_placement.empty()) break;
    placement = std::move(best_placement);
    out.comp = std::move(best_comp);
    out.trace.push_back(out.comp.objective);
    ++out.accepted;
  }
  return out;
}

std::vector<int> equal_split_units(int total_units, int claim_count) {
  std::vector<int> units(static_cast<std::size_t>(claim_count), 0);
  if (claim_count == 0) return units;
  const int base = total_units / claim_count;
  const int rem = total_units % claim_count;
  for (int c = 0; c < claim_count; ++c) {
    units[static_cast<std::size_t>(c)] = base + (c < rem ? 1 : 0);
  }
  return units;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Heuristic: return "heuristic";
    case Method::Dld: return "dld";
    case Method::Mec: return "mec";
    case Method::Gsa: return "gsa";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "exact") return Method::Exact;
  if (name == "heuristic") return Method::Heuristic;
  if (name == "dld") return Method::Dld;
  if (name == "mec") return Method::Mec;
  if (name == "gsa") return Method::Gsa;
  return std::nullopt;
}

int max_hosted(const ServerSpec& server) {
  return static_cast<int>(std::floor(server.capacity / server.min_alloc + kShareSlack));
}

ReservedCapacity reserve_capacity(std::span<const ServerSpec> servers,
                                  int bandwidth_total,
                                  const DemandVector& demand) {
  if (demand.cpu_demand < 0.0 || demand.gpu_demand < 0.0 ||
      demand.bandwidth_demand < 0.0) {
    throw std::invalid_argument("reserve_capacity: demand must be non-negative");
  }
  ReservedCapacity out;
  out.servers.assign(servers.begin(), servers.end());
  int n_cpu = 0;
  int n_gpu = 0;
  for (const ServerSpec& s : servers) {
    (s.kind == ServerKind::Cpu ? n_cpu : n_gpu) += 1;
  }
  for (ServerSpec& s : out.servers) {
    const bool cpu = s.kind == ServerKind::Cpu;
    const int pool = cpu ? n_cpu : n_gpu;
    const double share = (cpu ? demand.cpu_demand : demand.gpu_demand) / pool;
    double reduced = s.capacity - share;
    if (reduced < s.min_alloc) {
      reduced = s.min_alloc;
      out.over_demand = true;
    }
    s.capacity = reduced;
  }
  if (n_cpu == 0 && demand.cpu_demand > 0.0) out.over_demand = true;
  if (n_gpu == 0 && demand.gpu_demand > 0.0) out.over_demand = true;

  out.bandwidth_units =
      bandwidth_total - static_cast<int>(std::lround(demand.bandwidth_demand));
  if (out.bandwidth_units < 1) {
    out.bandwidth_units = 1;
    out.over_demand = true;
  }
  return out;
}

std::vector<std::string> allocation_violations(const ProblemInstance& instance,
                                               const Allocation& alloc) {
  std::vector<std::string> v;
  if (alloc.tasks.size() != instance.tasks.size()) {
    v.push_back("allocation covers " + std::to_string(alloc.tasks.size()) +
                " tasks, instance has " + std::to_string(instance.tasks.size()));
    return v;
  }
  std::vector<int> counts(instance.servers.size(), 0);
  long long total_units = 0;
  for (std::size_t i = 0; i < alloc.tasks.size(); ++i) {
    const TaskAssignment& a = alloc.tasks[i];
    const int id = instance.tasks[i].id;
    if (a.server == TaskAssignment::kLocal) {
      if (a.units != 0) {
        v.push_back("task " + std::to_string(id) + ": local but holds bandwidth units");
      }
      continue;
    }
    if (a.server < 0 || static_cast<std::size_t>(a.server) >= instance.servers.size()) {
      v.push_back("task " + std::to_string(id) + ": server index " +
                  std::to_string(a.server) + " out of range");
      continue;
    }
    const ServerSpec& server = instance.servers[static_cast<std::size_t>(a.server)];
    if (!kind_compatible(instance.tasks[i], server)) {
      v.push_back("task " + std::to_string(id) + ": common task placed on GPU server " +
                  std::to_string(server.id));
    }
    if (a.units < 1) {
      v.push_back("task " + std::to_string(id) + ": offloaded with no bandwidth unit");
    }
    if (a.power < instance.cost.power_min || a.power > instance.cost.power_max) {
      v.push_back("task " + std::to_string(id) + ": power " + std::to_string(a.power) +
                  " outside bounds");
    }
    ++counts[static_cast<std::size_t>(a.server)];
    total_units += a.units;
  }
  if (total_units > instance.bandwidth_units) {
    v.push_back("bandwidth budget exceeded: " + std::to_string(total_units) + " > " +
                std::to_string(instance.bandwidth_units));
  }
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const int limit = max_hosted(instance.servers[s]);
    if (counts[s] > limit) {
      v.push_back("server " + std::to_string(instance.servers[s].id) + ": hosts " +
                  std::to_string(counts[s]) + " tasks, slot limit " + std::to_string(limit));
    }
  }
  return v;
}

void validate_allocation(const ProblemInstance& instance,
                         const Allocation& alloc) {
  const auto v = allocation_violations(instance, alloc);
  if (v.empty()) return;
  std::string msg = "invalid allocation:";
  for (const auto& item : v) msg += "\n  " + item;
  throw std::invalid_argument(msg);
}

EvalResult evaluate(const ProblemInstance& instance, const Allocation& alloc) {
  validate_allocation(instance, alloc);
  std::vector<int> placement(alloc.tasks.size(), TaskAssignment::kLocal);
  for (std::size_t i = 0; i < alloc.tasks.size(); ++i) {
    placement[i] = alloc.tasks[i].server;
  }
  const std::vector<int> counts = hosted_counts(instance, placement);
  EvalResult out;
  out.per_task.reserve(alloc.tasks.size());
  for (std::size_t i = 0; i < alloc.tasks.size(); ++i) {
    const TaskAssignment& a = alloc.tasks[i];
    if (a.offloaded()) {
      const ServerSpec& server = instance.servers[static_cast<std::size_t>(a.server)];
      const double share = server.capacity / counts[static_cast<std::size_t>(a.server)];
      out.per_task.push_back(cost_offload(instance.tasks[i], server, share,
                                          a.units, a.power, instance.cost));
    } else {
      out.per_task.push_back(cost_local(instance.tasks[i], instance.cost));
    }
  }
  out.objective = utility(instance.tasks, out.per_task);
  return out;
}

double optimize_power(const TaskSpec& task, const ServerSpec& server,
                      double share, int units, const CostParams& params) {
  if (units < 1) throw std::invalid_argument("optimize_power: units must be >= 1");
  auto objective = [&](double p) {
    const CostBreakdown c = cost_offload(task, server, share, units, p, params);
    if (!c.feasible) {
      throw std::logic_error("optimize_power: infeasible task/server combination");
    }
    return task.alpha * c.tet + task.beta * c.energy;
  };
  // Endpoints first so a monotone objective returns the exact bound; the
  // interior golden-section candidate only wins when strictly better.
  double best_p = params.power_min;
  double best_f = objective(best_p);
  const double f_max = objective(params.power_max);
  if (f_max < best_f) {
    best_p = params.power_max;
    best_f = f_max;
  }
  if (params.power_max - params.power_min > kPowerTol) {
    const GoldenResult g =
        golden_section_min(objective, params.power_min, params.power_max, kPowerTol);
    if (g.fx < best_f) {
      best_p = g.x;
      best_f = g.fx;
    }
  }
  return best_p;
}

std::vector<int> allocate_bandwidth(const ProblemInstance& instance,
                                    std::span<const BandwidthClaim> claims,
                                    int total_units) {
  const int k = static_cast<int>(claims.size());
  if (total_units < k) {
    throw std::runtime_error("allocate_bandwidth: " + std::to_string(k) +
                             " offloaded tasks need at least one unit each, have " +
                             std::to_string(total_units));
  }
  std::vector<int> units(claims.size(), 1);
  if (k == 0) return units;

  // Transmit cost of claim c at b units is coef[c] / b; the marginal gain of
  // one more unit is coef[c] * (1/b - 1/(b+1)).
  std::vector<double> coef(claims.size(), 0.0);
  for (std::size_t c = 0; c < claims.size(); ++c) {
    const TaskSpec& task = instance.tasks[static_cast<std::size_t>(claims[c].task_index)];
    if (task.data_bytes <= 0.0) continue;
    const double t1 = 8.0 * task.data_bytes /
                      uplink_rate(task, 1, claims[c].power, instance.cost);
    coef[c] = (task.alpha + task.beta * claims[c].power) * t1;
  }

  for (int rem = total_units - k; rem > 0; --rem) {
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < claims.size(); ++c) {
      const double b = static_cast<double>(units[c]);
      const double gain = coef[c] * (1.0 / b - 1.0 / (b + 1.0));
      if (gain > best_gain ||
          (gain == best_gain &&
           claims[c].task_index < claims[best].task_index)) {
        best_gain = gain;
        best = c;
      }
    }
    ++units[best];
  }
  return units;
}

SolveResult solve_exact(const ProblemInstance& instance,
                        const SolverConfig& cfg) {
  const std::size_t n = instance.tasks.size();
  const int m = static_cast<int>(instance.servers.size());

  long long combos = 1;
  for (std::size_t i = 0; i < n; ++i) {
    combos *= m + 1;
    if (combos > cfg.exact_limit) {
      throw ExactLimitError(
          "solve_exact: placement space exceeds exact_limit (" +
          std::to_string(cfg.exact_limit) + "); use solve_heuristic");
    }
  }

  PowerCache cache(n);
  std::vector<int> digits(n, 0);  // 0 = Local, d = server d-1; task 0 most significant
  std::optional<Completion> best;
  long long visited = 0;
  for (;;) {
    std::vector<int> placement(n);
    for (std::size_t i = 0; i < n; ++i) {
      placement[i] = digits[i] == 0 ? TaskAssignment::kLocal : digits[i] - 1;
    }
    ++visited;
    if (placement_feasible(instance, placement)) {
      Completion comp = complete_placement(instance, placement, cache);
      if (!best.has_value() || comp.objective < best->objective) {
        best = std::move(comp);
      }
    }
    // next placement in lexicographic order
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
  // The all-Local placement is always feasible, so `best` is set.
  return result_from_completion(instance, std::move(*best), Method::Exact,
                                visited, {best->objective});
}

SolveResult solve_heuristic(const ProblemInstance& instance,
                            const SolverConfig& cfg) {
  const std::size_t n = instance.tasks.size();
  const int m = static_cast<int>(instance.servers.size());
  PowerCache cache(n);

  // Greedy construction: heaviest weighted compute first, each task to the
  // placement with the lowest partial objective under current loads.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.tasks[a].alpha * instance.tasks[a].cycles >
           instance.tasks[b].alpha * instance.tasks[b].cycles;
  });
  std::vector<int> greedy(n, kUnplaced);
  std::vector<int> candidate;
  for (const std::size_t idx : order) {
    int best_v = TaskAssignment::kLocal;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int v = TaskAssignment::kLocal; v < m; ++v) {
      candidate = greedy;
      candidate[idx] = v;
      if (!placement_feasible(instance, candidate)) continue;
      const Completion comp = complete_placement(instance, candidate, cache);
      if (comp.objective < best_obj) {
        best_obj = comp.objective;
        best_v = v;
      }
    }
    greedy[idx] = best_v;
  }

  SearchOutcome from_greedy = local_search(instance, greedy, cache, cfg.max_iters);
  SearchOutcome from_fastest = local_search(
      instance, fastest_server_placement(instance), cache, cfg.max_iters);

  SearchOutcome& winner = from_fastest.comp.objective < from_greedy.comp.objective
                              ? from_fastest
                              : from_greedy;
  const long long iterations = from_greedy.accepted + from_fastest.accepted;
  return result_from_completion(instance, std::move(winner.comp),
                                Method::Heuristic, iterations,
                                std::move(winner.trace));
}

SolveResult baseline_dld(const ProblemInstance& instance) {
  const std::size_t n = instance.tasks.size();

  // Delay demand level = latency sensitivity; most demanding tasks pick first.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.tasks[a].sensitivity > instance.tasks[b].sensitivity;
  });

  std::vector<int> placement(n, TaskAssignment::kLocal);
  std::vector<int> counts(instance.servers.size(), 0);
  int offloaded = 0;
  for (const std::size_t idx : order) {
    const TaskSpec& task = instance.tasks[idx];
    if (offloaded >= instance.bandwidth_units) continue;
    const int units_est = std::max(1, instance.bandwidth_units / (offloaded + 1));
    const double tx_est =
        task.data_bytes > 0.0
            ? 8.0 * task.data_bytes /
                  uplink_rate(task, units_est, instance.cost.power_max, instance.cost)
            : 0.0;
    int best_server = TaskAssignment::kLocal;
    double best_tet = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < instance.servers.size(); ++s) {
      const ServerSpec& server = instance.servers[s];
      if (!kind_compatible(task, server)) continue;
      if (counts[s] + 1 > max_hosted(server)) continue;
      const double share = server.capacity / (counts[s] + 1);
      const auto rate = effective_rate(server, task, instance.cost, share);
      if (!rate.has_value()) continue;
      const double tet = tx_est + task.cycles / *rate;
      if (tet < best_tet) {
        best_tet = tet;
        best_server = static_cast<int>(s);
      }
    }
    if (best_server != TaskAssignment::kLocal) {
      placement[idx] = best_server;
      ++counts[static_cast<std::size_t>(best_server)];
      ++offloaded;
    }
  }

  // Bandwidth proportional to payload, every offloaded task keeps >= 1 unit,
  // leftover goes to the largest payload.
  std::vector<std::size_t> off_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (placement[i] >= 0) off_idx.push_back(i);
  }
  Allocation alloc;
  alloc.tasks.assign(n, TaskAssignment{});
  if (!off_idx.empty()) {
    double total_data = 0.0;
    for (std::size_t i : off_idx) total_data += instance.tasks[i].data_bytes;
    const int budget = instance.bandwidth_units;
    std::vector<int> units(off_idx.size(), 1);
    if (total_data > 0.0) {
      for (std::size_t c = 0; c < off_idx.size(); ++c) {
        const double raw = budget * instance.tasks[off_idx[c]].data_bytes / total_data;
        units[c] = std::max(1, static_cast<int>(std::floor(raw)));
      }
    } else {
      units = equal_split_units(budget, static_cast<int>(off_idx.size()));
      for (int& u : units) u = std::max(u, 1);
    }
    long long used = std::accumulate(units.begin(), units.end(), 0LL);
    while (used > budget) {
      // Rounding plus the 1-unit floor can overshoot; shave the largest holder.
      std::size_t biggest = 0;
      for (std::size_t c = 1; c < units.size(); ++c) {
        if (units[c] > units[biggest]) biggest = c;
      }
      --units[biggest];
      --used;
    }
    if (used < budget) {
      std::size_t largest = 0;
      for (std::size_t c = 1; c < off_idx.size(); ++c) {
        if (instance.tasks[off_idx[c]].data_bytes >
            instance.tasks[off_idx[largest]].data_bytes) {
          largest = c;
        }
      }
      units[largest] += static_cast<int>(budget - used);
    }
    for (std::size_t c = 0; c < off_idx.size(); ++c) {
      auto& a = alloc.tasks[off_idx[c]];
      a.server = placement[off_idx[c]];
      a.units = units[c];
      a.power = instance.cost.power_max;
    }
  }

  EvalResult eval = evaluate(instance, alloc);
  SolveResult r;
  r.allocation = std::move(alloc);
  r.objective = eval.objective;
  r.per_task_costs = std::move(eval.per_task);
  r.method = Method::Dld;
  r.iterations = 1;
  r.objective_trace = {r.objective};
  return r;
}

SolveResult baseline_mec(const ProblemInstance& instance) {
  const std::size_t n = instance.tasks.size();
  const int units_est =
      std::max(1, instance.bandwidth_units / std::max<int>(1, static_cast<int>(n)));

  std::vector<int> placement(n, TaskAssignment::kLocal);
  std::vector<int> counts(instance.servers.size(), 0);
  int offloaded = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const TaskSpec& task = instance.tasks[i];
    if (offloaded >= instance.bandwidth_units) continue;
    int target = TaskAssignment::kLocal;
    for (std::size_t s = 0; s < instance.servers.size(); ++s) {
      const ServerSpec& server = instance.servers[s];
      if (!kind_compatible(task, server)) continue;
      if (counts[s] + 1 > max_hosted(server)) continue;
      target = static_cast<int>(s);
      break;  // transmit energy is server-independent; first slot wins
    }
    if (target == TaskAssignment::kLocal) continue;
    const ServerSpec& server = instance.servers[static_cast<std::size_t>(target)];
    const double share = server.capacity / (counts[static_cast<std::size_t>(target)] + 1);
    const CostBreakdown off = cost_offload(task, server, share, units_est,
                                           instance.cost.power_min, instance.cost);
    const CostBreakdown local = cost_local(task, instance.cost);
    if (off.feasible && off.energy < local.energy) {
      placement[i] = target;
      ++counts[static_cast<std::size_t>(target)];
      ++offloaded;
    }
  }

  Allocation alloc;
  alloc.tasks.assign(n, TaskAssignment{});
  std::vector<std::size_t> off_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (placement[i] >= 0) off_idx.push_back(i);
  }
  const std::vector<int> units =
      equal_split_units(instance.bandwidth_units, static_cast<int>(off_idx.size()));
  for (std::size_t c = 0; c < off_idx.size(); ++c) {
    auto& a = alloc.tasks[off_idx[c]];
    a.server = placement[off_idx[c]];
    a.units = units[c];
    a.power = instance.cost.power_min;
  }

  EvalResult eval = evaluate(instance, alloc);
  SolveResult r;
  r.allocation = std::move(alloc);
  r.objective = eval.objective;
  r.per_task_costs = std::move(eval.per_task);
  r.method = Method::Mec;
  r.iterations = 1;
  r.objective_trace = {r.objective};
  return r;
}

SolveResult baseline_gsa(const ProblemInstance& instance,
                         const SolverConfig& cfg) {
  const std::size_t n = instance.tasks.size();
  const std::vector<int> placement = fastest_server_placement(instance);
  const std::vector<int> counts = hosted_counts(instance, placement);

  std::vector<std::size_t> off_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (placement[i] >= 0) off_idx.push_back(i);
  }

  Allocation alloc;
  alloc.tasks.assign(n, TaskAssignment{});
  const std::vector<int> init_units =
      equal_split_units(instance.bandwidth_units, static_cast<int>(off_idx.size()));
  for (std::size_t c = 0; c < off_idx.size(); ++c) {
    auto& a = alloc.tasks[off_idx[c]];
    a.server = placement[off_idx[c]];
    a.units = init_units[c];
    a.power = instance.cost.power_max;
  }

  EvalResult eval = evaluate(instance, alloc);
  std::vector<double> trace{eval.objective};
  long long sweeps = 0;

  if (!off_idx.empty()) {
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      // Coordinate pass: per-task power given current units, then the
      // bandwidth split given the new powers.
      for (std::size_t i : off_idx) {
        const auto s = static_cast<std::size_t>(placement[i]);
        const ServerSpec& server = instance.servers[s];
        const double share = server.capacity / counts[s];
        alloc.tasks[i].power = optimize_power(instance.tasks[i], server, share,
                                              alloc.tasks[i].units, instance.cost);
      }
      std::vector<BandwidthClaim> claims;
      claims.reserve(off_idx.size());
      for (std::size_t i : off_idx) {
        claims.push_back({static_cast<int>(i), alloc.tasks[i].power});
      }
      const std::vector<int> units =
          allocate_bandwidth(instance, claims, instance.bandwidth_units);
      for (std::size_t c = 0; c < off_idx.size(); ++c) {
        alloc.tasks[off_idx[c]].units = units[c];
      }
      eval = evaluate(instance, alloc);
      trace.push_back(eval.objective);
      ++sweeps;
      if (trace[trace.size() - 2] - trace.back() < cfg.tol) break;
    }
  }

  SolveResult r;
  r.allocation = std::move(alloc);
  r.objective = eval.objective;
  r.per_task_costs = std::move(eval.per_task);
  r.method = Method::Gsa;
  r.iterations = sweeps;
  r.objective_trace = std::move(trace);
  return r;
}

SolveResult solve(const ProblemInstance& instance, Method method,
                  const SolverConfig& cfg) {
  switch (method) {
    case Method::Exact: return solve_exact(instance, cfg);
    case Method::Heuristic: return solve_heuristic(instance, cfg);
    case Method::Dld: return baseline_dld(instance);
    case Method::Mec: return baseline_mec(instance);
    case Method::Gsa: return baseline_gsa(instance, cfg);
  }
  throw std::invalid_argument("solve: unknown method");
}

// --- JSON bindings ---

void to_json(nlohmann::json& j, const TaskSpec& t) {
  j = {{"id", t.id},
       {"data_bytes", t.data_bytes},
       {"cycles", t.cycles},
       {"special", t.special},
       {"sensitivity", t.sensitivity},
       {"deadline", t.deadline},
       {"alpha", t.alpha},
       {"beta", t.beta},
       {"unit_bandwidth_rate", t.unit_bandwidth_rate},
       {"snr_coeff", t.snr_coeff}};
}

void from_json(const nlohmann::json& j, TaskSpec& t) {
  j.at("id").get_to(t.id);
  j.at("data_bytes").get_to(t.data_bytes);
  j.at("cycles").get_to(t.cycles);
  j.at("special").get_to(t.special);
  j.at("sensitivity").get_to(t.sensitivity);
  j.at("deadline").get_to(t.deadline);
  j.at("alpha").get_to(t.alpha);
  j.at("beta").get_to(t.beta);
  j.at("unit_bandwidth_rate").get_to(t.unit_bandwidth_rate);
  j.at("snr_coeff").get_to(t.snr_coeff);
}

void to_json(nlohmann::json& j, const ServerSpec& s) {
  j = {{"id", s.id},
       {"kind", s.kind == ServerKind::Cpu ? "cpu" : "gpu"},
       {"capacity", s.capacity},
       {"min_alloc", s.min_alloc}};
}

void from_json(const nlohmann::json& j, ServerSpec& s) {
  j.at("id").get_to(s.id);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cpu") {
    s.kind = ServerKind::Cpu;
  } else if (kind == "gpu") {
    s.kind = ServerKind::Gpu;
  } else {
    throw std::invalid_argument("server kind must be \"cpu\" or \"gpu\", got \"" + kind + "\"");
  }
  j.at("capacity").get_to(s.capacity);
  j.at("min_alloc").get_to(s.min_alloc);
}

void to_json(nlohmann::json& j, const CostParams& c) {
  j = {{"local_capacity", c.local_capacity},
       {"kappa", c.kappa},
       {"gpu_special_efficiency", c.gpu_special_efficiency},
       {"power_min", c.power_min},
       {"power_max", c.power_max}};
}

void from_json(const nlohmann::json& j, CostParams& c) {
  j.at("local_capacity").get_to(c.local_capacity);
  j.at("kappa").get_to(c.kappa);
  j.at("gpu_special_efficiency").get_to(c.gpu_special_efficiency);
  j.at("power_min").get_to(c.power_min);
  j.at("power_max").get_to(c.power_max);
}

void to_json(nlohmann::json& j, const DemandVector& d) {
  j = {{"cpu_demand", d.cpu_demand},
       {"gpu_demand", d.gpu_demand},
       {"bandwidth_demand", d.bandwidth_demand}};
}

void from_json(const nlohmann::json& j, DemandVector& d) {
  j.at("cpu_demand").get_to(d.cpu_demand);
  j.at("gpu_demand").get_to(d.gpu_demand);
  j.at("bandwidth_demand").get_to(d.bandwidth_demand);
}

void to_json(nlohmann::json& j, const TaskAssignment& a) {
  j = {{"server", a.server}, {"units", a.units}, {"power", a.power}};
}

void from_json(const nlohmann::json& j, TaskAssignment& a) {
  j.at("server").get_to(a.server);
  j.at("units").get_to(a.units);
  j.at("power").get_to(a.power);
}

void to_json(nlohmann::json& j, const CostBreakdown& c) {
  j = {{"tx_time", c.tx_time},
       {"exec_time", c.exec_time},
       {"tet", c.tet},
       {"energy", c.energy},
       {"feasible", c.feasible}};
}

void from_json(const nlohmann::json& j, CostBreakdown& c) {
  j.at("tx_time").get_to(c.tx_time);
  j.at("exec_time").get_to(c.exec_time);
  j.at("tet").get_to(c.tet);
  j.at("energy").get_to(c.energy);
  j.at("feasible").get_to(c.feasible);
}

void to_json(nlohmann::json& j, const ProblemInstance& p) {
  j = {{"tasks", p.tasks},
       {"servers", p.servers},
       {"cost", p.cost},
       {"bandwidth_units", p.bandwidth_units},
       {"reservation", p.reservation},
       {"over_demand", p.over_demand}};
}

void from_json(const nlohmann::json& j, ProblemInstance& p) {
  j.at("tasks").get_to(p.tasks);
  j.at("servers").get_to(p.servers);
  j.at("cost").get_to(p.cost);
  j.at("bandwidth_units").get_to(p.bandwidth_units);
  j.at("reservation").get_to(p.reservation);
  j.at("over_demand").get_to(p.over_demand);
}

void to_json(nlohmann::json& j, const SolveResult& r) {
  j = {{"method", method_name(r.method)},
       {"objective", r.objective},
       {"iterations", r.iterations},
       {"objective_trace", r.objective_trace},
       {"allocation", r.allocation.tasks},
       {"per_task_costs", r.per_task_costs}};
}

void from_json(const nlohmann::json& j, SolveResult& r) {
  const auto method = method_from_name(j.at("method").get<std::string>());
  if (!method.has_value()) {
    throw std::invalid_argument("unknown method in solve result JSON");
  }
  r.method = *method;
  j.at("objective").get_to(r.objective);
  j.at("iterations").get_to(r.iterations);
  j.at("objective_trace").get_to(r.objective_trace);
  j.at("allocation").get_to(r.allocation.tasks);
  j.at("per_task_costs").get_to(r.per_task_costs);
}

}  // namespace edgesim
