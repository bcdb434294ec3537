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

// Brute-force validation tools. These deliberately avoid the solver machinery
// (golden-section search, greedy bandwidth, local search) so they can certify
// it: the only shared substrate is the cost model itself.

#pragma once

#include <span>

#include "edgesim/allocator.hpp"
#include "edgesim/forecast.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

struct OracleResult {
  double objective = 0.0;
  long long placements = 0;  // placements enumerated
};

// Minimum objective over every placement vector, every integer bandwidth
// composition (>= 1 unit per offloaded task, summing to the full budget) and
// every per-task power on a uniform grid of the given step. Desk scale only.
OracleResult exhaustive_solve(const ProblemInstance& instance,
                              double power_step = 1e-3);

// Central finite differences of the batch MSE with respect to every weight
// and bias, evaluated through the raw forward pass.
Gradients finite_difference_grads(const NetworkParams& params,
                                  std::span<const DatasetPair> batch,
                                  double step = 1e-5);

struct SmallInstanceOptions {
  int max_tasks = 4;
  int max_servers = 2;
  int max_units = 6;
};

// Random desk-scale instance for solver cross-validation: mixed CPU/GPU
// servers, tasks drawn from the default scenario distributions, no
// reservation.
ProblemInstance random_small_instance(Rng& rng,
                                      const SmallInstanceOptions& opts = {});

}  // namespace edgesim
