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

// End-to-end acceptance suite. Every criterion runs at its pinned tolerance
// and prints exactly one PASS/FAIL line; the binary exits non-zero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edgesim/harness.hpp"
#include "edgesim/kernels.hpp"
#include "edgesim/oracle.hpp"

using namespace edgesim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Outcome& outcome,
            double seconds, double budget_s) {
  const bool in_budget = seconds <= budget_s;
  const bool pass = outcome.pass && in_budget;
  if (!pass) ++g_failures;
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << " — "
       << outcome.detail;
  if (!in_budget) {
    line << " (exceeded time budget " << budget_s << " s)";
  }
  line.precision(1);
  line << " [" << std::fixed << seconds << " s]";
  std::cout << line.str() << std::endl;
}

template <typename Fn>
void run_criterion(int id, const std::string& name, double budget_s, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = fn();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, outcome, seconds, budget_s);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

// --- criterion 1 -----------------------------------------------------------

Outcome oracle_optimality() {
  Rng rng(20260801);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = random_small_instance(rng);
    const SolveResult exact = solve_exact(inst);
    const OracleResult oracle = exhaustive_solve(inst, 1e-3);
    const double rel = std::abs(exact.objective - oracle.objective) /
                       std::max(std::abs(oracle.objective), 1e-12);
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-6,
          "100 instances (N<=4, M<=2, B<=6), max relative objective gap " + fmt(worst) +
              " vs limit 1e-6"};
}

// --- criterion 2 -----------------------------------------------------------

Outcome gradient_audit() {
  const std::vector<std::vector<int>> shapes = {
      {8, 32, 16, 3}, {5, 16, 8, 3}, {6, 10, 3}, {4, 7, 5, 3}, {8, 24, 12, 3}};
  Rng rng(42);
  double worst = 0.0;
  int pairs = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const std::vector<int>& shape = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    NetworkParams params;
    std::vector<DatasetPair> batch;
    for (;;) {
      params = init_params(shape, rng.next_u64());
      const int batch_size = 2 + static_cast<int>(rng.below(6));
      batch.clear();
      for (int b = 0; b < batch_size; ++b) {
        DatasetPair pair;
        pair.x.values.resize(static_cast<std::size_t>(shape.front()));
        for (double& v : pair.x.values) v = rng.normal(0.0, 1.0);
        pair.y = {rng.normal(0.0, 1.0), rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
        batch.push_back(std::move(pair));
      }
      // Resample when a hidden pre-activation sits on the ReLU kink.
      bool near_kink = false;
      for (const auto& pair : batch) {
        std::vector<double> x = pair.x.values;
        for (std::size_t l = 0; l + 1 < shape.size() && !near_kink; ++l) {
          std::vector<double> z(static_cast<std::size_t>(shape[l + 1]));
          for (int r = 0; r < shape[l + 1]; ++r) {
            double acc = params.biases[l][static_cast<std::size_t>(r)];
            for (int c = 0; c < shape[l]; ++c) {
              acc += params.weights[l][static_cast<std::size_t>(r) * shape[l] + c] *
                     x[static_cast<std::size_t>(c)];
            }
            z[static_cast<std::size_t>(r)] = acc;
            if (l + 2 < shape.size() && std::abs(acc) < 1e-6) near_kink = true;
          }
          for (auto& v : z) v = std::max(v, 0.0);
          x = z;
        }
        if (near_kink) break;
      }
      if (!near_kink) break;
    }
    ++pairs;
    const Gradients analytic = backprop_grads(params, batch);
    const Gradients numeric = finite_difference_grads(params, batch, 1e-5);
    for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
      for (std::size_t i = 0; i < analytic.weights[l].size(); ++i) {
        const double a = analytic.weights[l][i];
        const double n = numeric.weights[l][i];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}));
      }
      for (std::size_t i = 0; i < analytic.biases[l].size(); ++i) {
        const double a = analytic.biases[l][i];
        const double n = numeric.biases[l][i];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}));
      }
    }
  }
  return {worst < 1e-4, std::to_string(pairs) +
                            " network/batch pairs (incl. 2-hidden-layer), max relative "
                            "gradient error " + fmt(worst) + " vs limit 1e-4"};
}

// --- criterion 3 -----------------------------------------------------------

Outcome learning_sanity() {
  const std::vector<double> a{
      1.0, 0.5, 0.0, 0.2, 0.0, 1.5, 0.3, 0.0,
      0.0, 2.0, 1.0, 0.0, 0.7, 0.0, 0.0, 0.4,
      0.3, 0.0, 0.0, 1.2, 0.0, 0.0, 2.0, 1.0,
  };
  Rng rng(7);
  std::vector<DatasetPair> dataset;
  std::vector<DemandVector> actuals;
  for (int s = 0; s < 200; ++s) {
    DatasetPair pair;
    pair.x.t = s;
    pair.x.values.resize(8);
    for (double& v : pair.x.values) v = rng.uniform(0.0, 1.0);
    double y[3] = {0.0, 0.0, 0.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 8; ++c) {
        y[r] += a[static_cast<std::size_t>(r) * 8 + c] * pair.x.values[static_cast<std::size_t>(c)];
      }
    }
    pair.y = {y[0], y[1], y[2]};
    actuals.push_back(pair.y);
    dataset.push_back(std::move(pair));
  }

  const NetworkParams p0 = init_params({8, 3}, 123);
  std::vector<DemandVector> pred0;
  for (const auto& pair : dataset) pred0.push_back(predict_demand(p0, pair.x));
  const double initial = mse(pred0, actuals);

  const TrainResult tr = train(p0, dataset, TrainConfig{});  // 200 epochs, defaults
  const double final_loss = tr.loss_history.back();
  return {final_loss <= 0.01 * initial,
          "linear-demand dataset: initial MSE " + fmt(initial) + ", final " +
              fmt(final_loss) + " (ratio " + fmt(final_loss / initial) +
              " vs limit 0.01) in 200 epochs"};
}

// --- criterion 4 -----------------------------------------------------------

Outcome figure_ordering() {
  ExperimentConfig cfg = default_config();  // 30 seeds, heuristic+dld+mec+gsa
  const MetricsReport report = run_experiment(cfg);
  if (!report.errors.empty()) {
    return {false, "pipeline errors: " + report.errors.front()};
  }

  // "Ours" = forecaster + reservation + heuristic at this scale.
  std::map<std::uint64_t, std::map<Method, double>> per_seed;
  for (const RunRecord& rec : report.runs) {
    per_seed[rec.seed][rec.method] = rec.objective;
  }
  int objective_violations = 0;
  for (const auto& [seed, by_method] : per_seed) {
    const double ours = by_method.at(Method::Heuristic);
    for (const Method m : {Method::Dld, Method::Mec, Method::Gsa}) {
      if (ours > by_method.at(m)) ++objective_violations;
    }
  }

  std::map<Method, MethodAggregate> agg;
  for (const auto& [method, a] : report.aggregates) agg[method] = a;
  const MethodAggregate& ours = agg.at(Method::Heuristic);

  std::ostringstream detail;
  bool pass = objective_violations == 0;
  detail << "objective<=baseline on every seed: " << objective_violations
         << " violations";
  for (const Method m : {Method::Dld, Method::Mec, Method::Gsa}) {
    const MethodAggregate& b = agg.at(m);
    const bool tet_ok = ours.mean_tet <= b.mean_tet * 1.05;
    const bool energy_ok = ours.mean_energy <= b.mean_energy * 1.05;
    const bool completion_ok = ours.completion_rate >= b.completion_rate - 0.02;
    pass = pass && tet_ok && energy_ok && completion_ok;
    detail << "; vs " << method_name(m) << ": tet " << fmt(ours.mean_tet) << "/"
           << fmt(b.mean_tet) << (tet_ok ? " ok" : " FAIL") << ", energy "
           << fmt(ours.mean_energy) << "/" << fmt(b.mean_energy)
           << (energy_ok ? " ok" : " FAIL") << ", completion "
           << fmt(ours.completion_rate) << "/" << fmt(b.completion_rate)
           << (completion_ok ? " ok" : " FAIL");
  }
  return {pass, detail.str()};
}

// --- criterion 5 -----------------------------------------------------------

Outcome monotone_descent() {
  Rng rng(1001);
  int violations = 0;
  int traces = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SmallInstanceOptions opts;
    opts.max_tasks = 8;
    opts.max_servers = 4;
    opts.max_units = 20;
    const ProblemInstance inst = random_small_instance(rng, opts);
    for (const SolveResult& r : {solve_heuristic(inst), baseline_gsa(inst)}) {
      ++traces;
      for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
        if (r.objective_trace[i] > r.objective_trace[i - 1]) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(traces) +
                               " heuristic/GSA traces on 100 instances, " +
                               std::to_string(violations) + " increases (limit 0)"};
}

// --- criterion 6 -----------------------------------------------------------

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome determinism() {
#ifdef EDGESIM_SOURCE_DIR
  const ExperimentConfig cfg =
      load_config(std::filesystem::path(EDGESIM_SOURCE_DIR) / "configs" / "defaults.json");
#else
  const ExperimentConfig cfg = default_config();
#endif
  const auto base = std::filesystem::temp_directory_path() / "edgesim_acceptance";
  const auto dir1 = base / "determinism_run1";
  const auto dir2 = base / "determinism_run2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);

  emit_report(run_experiment(cfg), dir1);
  emit_report(run_experiment(cfg), dir2);

  int mismatches = 0;
  for (const char* name : {"per_task.csv", "summary.csv", "report.json"}) {
    if (slurp(dir1 / name) != slurp(dir2 / name)) ++mismatches;
  }
  std::filesystem::remove_all(base);
  return {mismatches == 0,
          "two runs of the default config, " + std::to_string(mismatches) +
              " of 3 emitted files differ (limit 0)"};
}

// --- criterion 7 -----------------------------------------------------------

Outcome eq1_oracle() {
  Rng rng(314159);
  long long checks = 0;
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.below(60));
    std::vector<double> series(static_cast<std::size_t>(len));
    for (double& v : series) v = rng.uniform(-100.0, 100.0);
    for (int k = 1; k <= len; ++k) {
      double brute = 0.0;
      for (int i = 0; i < k; ++i) brute += series[static_cast<std::size_t>(len - 1 - i)];
      brute /= k;
      const double got = moving_average(series, k);
      ++checks;
      if (std::abs(got - brute) > 1e-12 * (std::abs(brute) + 1.0)) ++violations;
    }
  }
  return {violations == 0, std::to_string(checks) + " window checks over 1000 series, " +
                               std::to_string(violations) + " disagreements (limit 0)"};
}

// --- criterion 8 -----------------------------------------------------------

Outcome feasibility_gate() {
  Rng rng(271828);
  long long validated = 0;
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    SmallInstanceOptions opts;
    opts.max_tasks = 5;
    opts.max_servers = 3;
    opts.max_units = 12;
    const ProblemInstance inst = random_small_instance(rng, opts);
    std::vector<Method> methods{Method::Heuristic, Method::Dld, Method::Mec, Method::Gsa};
    double combos = std::pow(static_cast<double>(inst.servers.size() + 1),
                             static_cast<double>(inst.tasks.size()));
    if (combos <= 2000.0) methods.push_back(Method::Exact);
    for (const Method m : methods) {
      const SolveResult r = solve(inst, m);
      ++validated;
      if (!allocation_violations(inst, r.allocation).empty()) ++violations;
    }
  }
  return {violations == 0, std::to_string(validated) +
                               " allocations over 1000 instances, " +
                               std::to_string(violations) + " validator failures (limit 0)"};
}

}  // namespace

int main() {
  std::cout << "edgesim acceptance suite (kernels: " << kernels::active().name
            << ")\n";
  run_criterion(1, "exact solver vs exhaustive oracle", 60.0, oracle_optimality);
  run_criterion(2, "backprop gradient audit", 10.0, gradient_audit);
  run_criterion(3, "forecaster learning sanity", 30.0, learning_sanity);
  run_criterion(4, "figure ordering on the default scenario", 300.0, figure_ordering);
  run_criterion(5, "monotone descent of heuristic and GSA", 120.0, monotone_descent);
  run_criterion(6, "byte-identical reports across runs", 300.0, determinism);
  run_criterion(7, "moving average vs brute-force mean", 30.0, eq1_oracle);
  run_criterion(8, "allocation feasibility gate", 300.0, feasibility_gate);

  std::cout << (g_failures == 0 ? "ACCEPTANCE: all criteria passed"
                                : "ACCEPTANCE: " + std::to_string(g_failures) +
                                      " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
