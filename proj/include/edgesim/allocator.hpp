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
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "edgesim/sysmodel.hpp"
#include "edgesim/workload.hpp"

namespace edgesim {

// Decision variables for one task: where it runs, how many bandwidth units
// it holds and at what transmit power it uploads. Local tasks hold no
// bandwidth and their power is ignored.
struct TaskAssignment {
  static constexpr int kLocal = -1;
  int server = kLocal;  // index into ProblemInstance::servers
  int units = 0;
  double power = 0.0;

  bool offloaded() const { return server >= 0; }
};

struct Allocation {
  std::vector<TaskAssignment> tasks;
};

// A solvable snapshot. Servers and bandwidth are the post-reservation
// capacities; `reservation` records what was subtracted.
struct ProblemInstance {
  std::vector<TaskSpec> tasks;
  std::vector<ServerSpec> servers;
  CostParams cost;
  int bandwidth_units = 50;
  DemandVector reservation;
  bool over_demand = false;
};

enum class Method { Exact, Heuristic, Dld, Mec, Gsa };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct SolverConfig {
  long long exact_limit = 100000;  // max placements solve_exact may enumerate
  double tol = 1e-6;               // GSA sweep convergence threshold
  int max_sweeps = 50;
  int max_iters = 1000;  // local-search move budget
};

struct SolveResult {
  Allocation allocation;
  double objective = 0.0;
  std::vector<CostBreakdown> per_task_costs;
  Method method = Method::Exact;
  long long iterations = 0;
  // Objective after each accepted improvement (heuristic) or sweep (GSA);
  // non-increasing by construction.
  std::vector<double> objective_trace;
};

struct EvalResult {
  double objective = 0.0;
  std::vector<CostBreakdown> per_task;
};

struct ReservedCapacity {
  std::vector<ServerSpec> servers;
  int bandwidth_units = 0;
  bool over_demand = false;
};

// Subtracts predicted background demand: CPU demand spread evenly over CPU
// servers, GPU demand over GPU servers, each capacity floored at min_alloc;
// bandwidth reduced by round(bandwidth_demand), floored at 1. over_demand is
// set whenever a floor absorbed part of the demand.
ReservedCapacity reserve_capacity(std::span<const ServerSpec> servers,
                                  int bandwidth_total,
                                  const DemandVector& demand);

// Hosted-task limit implied by the per-task minimum compute share.
int max_hosted(const ServerSpec& server);

// Empty when the allocation satisfies every invariant; otherwise one message
// per violated constraint, naming the task or server.
std::vector<std::string> allocation_violations(const ProblemInstance& instance,
                                               const Allocation& alloc);
void validate_allocation(const ProblemInstance& instance,
                         const Allocation& alloc);  // throws on violations

// Costs every task under the equal-share compute split and sums the weighted
// objective. Throws (never returns a sentinel) on invalid allocations.
EvalResult evaluate(const ProblemInstance& instance, const Allocation& alloc);

// Transmit power minimizing alpha * (t_tx + t_exec) + beta * p * t_tx on
// [power_min, power_max], by golden-section search (1e-6 W bracket) with an
// endpoint check so monotone objectives return an exact bound.
double optimize_power(const TaskSpec& task, const ServerSpec& server,
                      double share, int units, const CostParams& params);

struct BandwidthClaim {
  int task_index = 0;
  double power = 0.0;
};

// Integer bandwidth split: one unit per claim, then remaining units one at a
// time to the largest marginal objective decrease (ties to the lowest task
// id). Optimal for this model because each task's transmit cost is convex
// and decreasing in its units. Throws when total_units < claims.
std::vector<int> allocate_bandwidth(const ProblemInstance& instance,
                                    std::span<const BandwidthClaim> claims,
                                    int total_units);

struct ExactLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumerates every placement (ties to the lexicographically smallest vector,
// Local ordered before servers), completing each with optimized powers and
// bandwidth. Throws ExactLimitError above cfg.exact_limit placements.
SolveResult solve_exact(const ProblemInstance& instance,
                        const SolverConfig& cfg = {});

// Greedy construction ordered by descending alpha * cycles followed by
// best-improvement local search over single moves and pairwise swaps; also
// descends from the fastest-server placement and keeps the better endpoint.
SolveResult solve_heuristic(const ProblemInstance& instance,
                            const SolverConfig& cfg = {});

// Reference reimplementations of the comparison methods, in simplified form;
// these are not the cited authors' full algorithms.
SolveResult baseline_dld(const ProblemInstance& instance);
SolveResult baseline_mec(const ProblemInstance& instance);
SolveResult baseline_gsa(const ProblemInstance& instance,
                         const SolverConfig& cfg = {});

SolveResult solve(const ProblemInstance& instance, Method method,
                  const SolverConfig& cfg = {});

// JSON bindings (schema documented in the README).
void to_json(nlohmann::json& j, const TaskSpec& t);
void from_json(const nlohmann::json& j, TaskSpec& t);
void to_json(nlohmann::json& j, const ServerSpec& s);
void from_json(const nlohmann::json& j, ServerSpec& s);
void to_json(nlohmann::json& j, const CostParams& c);
void from_json(const nlohmann::json& j, CostParams& c);
void to_json(nlohmann::json& j, const DemandVector& d);
void from_json(const nlohmann::json& j, DemandVector& d);
void to_json(nlohmann::json& j, const TaskAssignment& a);
void from_json(const nlohmann::json& j, TaskAssignment& a);
void to_json(nlohmann::json& j, const CostBreakdown& c);
void from_json(const nlohmann::json& j, CostBreakdown& c);
void to_json(nlohmann::json& j, const ProblemInstance& p);
void from_json(const nlohmann::json& j, ProblemInstance& p);
void to_json(nlohmann::json& j, const SolveResult& r);
void from_json(const nlohmann::json& j, SolveResult& r);

}  // namespace edgesim
