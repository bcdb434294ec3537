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
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "edgesim/allocator.hpp"
#include "edgesim/forecast.hpp"

namespace edgesim {

struct ExperimentConfig {
  ScenarioConfig scenario;
  TrainConfig train;
  SolverConfig solver;
  CostParams cost;
  std::vector<ServerSpec> servers;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  double deadline_min = 0.2;  // s, deadline at sensitivity 1
  double deadline_max = 2.0;  // s, deadline as sensitivity approaches 0
  std::string output_dir = "out";
};

// Built-in defaults: 15 tasks over 5 CPU (9 Gcycles/s) + 5 GPU
// (100 Gcycles/s) servers, 50 bandwidth units, 30 seeds, methods
// heuristic/dld/mec/gsa.
ExperimentConfig default_config();

// Overrides merged over the defaults. Unknown keys are rejected with the
// offending key path; the merged config is validated before returning.
ExperimentConfig config_from_json(const nlohmann::json& overrides);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON serialization; changes iff a field changes.
std::string config_hash(const ExperimentConfig& cfg);

// Fraction of tasks finishing within their deadline; 1.0 for zero tasks.
double completion_rate(std::span<const TaskSpec> tasks,
                       std::span<const CostBreakdown> costs);

struct TaskMetric {
  int task_id = 0;
  double tet = 0.0;
  double energy = 0.0;
  double deadline = 0.0;
  bool met = false;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Method method = Method::Heuristic;
  double objective = 0.0;
  double completion = 0.0;
  long long iterations = 0;
  std::vector<TaskMetric> tasks;
};

// Per-seed pipeline provenance: what the forecaster predicted and how the
// reservation turned out.
struct SeedInfo {
  std::uint64_t seed = 0;
  DemandVector predicted;
  bool over_demand = false;
  double train_final_loss = 0.0;
};

struct MethodAggregate {
  int runs = 0;
  double mean_tet = 0.0, min_tet = 0.0, max_tet = 0.0, p95_tet = 0.0;
  double mean_energy = 0.0, min_energy = 0.0, max_energy = 0.0, p95_energy = 0.0;
  double completion_rate = 0.0;  // mean over runs
  double mean_objective = 0.0;
};

struct MetricsReport {
  int format_version = 1;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods;
  std::vector<SeedInfo> seed_info;
  std::vector<RunRecord> runs;
  std::vector<std::pair<Method, MethodAggregate>> aggregates;  // config order
  std::vector<std::string> errors;
};

// Full pipeline per seed: workload generation, forecaster training,
// next-step prediction, capacity reservation, then every configured method
// on the identical instance. A failing stage aborts only its seed; a failing
// method records a diagnostic and the run continues. Every allocation passes
// the validator before it reaches the report.
MetricsReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const MetricsReport& report);

// Writes per_task.csv, summary.csv and report.json into dir.
void emit_report(const MetricsReport& report, const std::filesystem::path& dir);

}  // namespace edgesim
