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

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "edgesim/format.hpp"
#include "edgesim/harness.hpp"
#include "edgesim/kernels.hpp"
#include "edgesim/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> methods;
  std::optional<std::uint64_t> seed;
};

edgesim::ExperimentConfig build_config(const RunOptions& opts) {
  edgesim::ExperimentConfig cfg = opts.config_path.empty()
                                      ? edgesim::default_config()
                                      : edgesim::load_config(opts.config_path);
  if (opts.seed.has_value()) cfg.seeds = {*opts.seed};
  if (!opts.methods.empty()) {
    cfg.methods.clear();
    for (const std::string& name : opts.methods) {
      const auto m = edgesim::method_from_name(name);
      if (!m.has_value()) {
        throw std::invalid_argument("config: unknown method \"" + name + "\"");
      }
      cfg.methods.push_back(*m);
    }
  }
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  edgesim::validate_config(cfg);
  return cfg;
}

void print_summary(const edgesim::MetricsReport& report) {
  std::printf("%-10s %12s %12s %12s %11s %14s\n", "method", "mean_tet", "p95_tet",
              "mean_energy", "completion", "objective");
  for (const auto& [method, agg] : report.aggregates) {
    std::printf("%-10s %12.6f %12.6f %12.6f %11.4f %14.6f\n",
                edgesim::method_name(method).c_str(), agg.mean_tet, agg.p95_tet,
                agg.mean_energy, agg.completion_rate, agg.mean_objective);
  }
  for (const std::string& err : report.errors) {
    std::cout << "warning: " << err << '\n';
  }
}

int cmd_run(const RunOptions& opts) {
  const edgesim::ExperimentConfig cfg = build_config(opts);
  const edgesim::MetricsReport report = edgesim::run_experiment(cfg);
  if (report.runs.empty()) {
    for (const std::string& err : report.errors) {
      std::cerr << "error: " << err << '\n';
    }
    std::cerr << "error: no run produced any result\n";
    return kExitRuntime;
  }
  edgesim::emit_report(report, cfg.output_dir);
  std::cout << "kernels: " << edgesim::kernels::active().name << '\n';
  std::cout << "config hash: " << report.config_hash << '\n';
  print_summary(report);
  std::cout << "report written to " << cfg.output_dir << '\n';
  return kExitOk;
}

int cmd_oracle(int instances, std::uint64_t seed, double power_step,
               const edgesim::SmallInstanceOptions& sizes) {
  edgesim::Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const edgesim::ProblemInstance inst = edgesim::random_small_instance(rng, sizes);
    const edgesim::SolveResult exact = edgesim::solve_exact(inst);
    const edgesim::OracleResult oracle = edgesim::exhaustive_solve(inst, power_step);
    const double rel = std::abs(exact.objective - oracle.objective) /
                       std::max(std::abs(oracle.objective), 1e-12);
    worst = std::max(worst, rel);
  }
  std::cout << "instances: " << instances << "\nmax relative objective gap: "
            << edgesim::format_double(worst) << '\n';
  if (worst > 1e-6) {
    std::cerr << "error: exact solver disagrees with the exhaustive oracle\n";
    return kExitRuntime;
  }
  std::cout << "solve_exact matches the exhaustive oracle\n";
  return kExitOk;
}

int cmd_gradcheck(int trials, std::uint64_t seed, double step) {
  const std::vector<std::vector<int>> shapes = {
      {8, 32, 16, 3}, {5, 16, 8, 3}, {6, 10, 3}, {4, 7, 5, 3}};
  edgesim::Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::vector<int>& shape = shapes[trial % shapes.size()];
    edgesim::NetworkParams params;
    std::vector<edgesim::DatasetPair> batch;
    // Resample when any hidden pre-activation sits on the ReLU kink, where
    // finite differences are meaningless.
    for (;;) {
      params = edgesim::init_params(shape, rng.next_u64());
      const int batch_size = 2 + static_cast<int>(rng.below(6));
      batch.clear();
      for (int b = 0; b < batch_size; ++b) {
        edgesim::DatasetPair pair;
        pair.x.values.resize(static_cast<std::size_t>(shape.front()));
        for (double& v : pair.x.values) v = rng.normal(0.0, 1.0);
        pair.y.cpu_demand = rng.normal(0.0, 1.0);
        pair.y.gpu_demand = rng.normal(0.0, 1.0);
        pair.y.bandwidth_demand = rng.normal(0.0, 1.0);
        batch.push_back(std::move(pair));
      }
      bool near_kink = false;
      for (const auto& pair : batch) {
        std::vector<double> x = pair.x.values;
        for (std::size_t l = 0; l + 1 < shape.size() && !near_kink; ++l) {
          std::vector<double> z(static_cast<std::size_t>(shape[l + 1]), 0.0);
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

    const edgesim::Gradients analytic = edgesim::backprop_grads(params, batch);
    const edgesim::Gradients numeric =
        edgesim::finite_difference_grads(params, batch, step);
    for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
      for (std::size_t w = 0; w < analytic.weights[l].size(); ++w) {
        const double a = analytic.weights[l][w];
        const double n = numeric.weights[l][w];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}));
      }
      for (std::size_t b = 0; b < analytic.biases[l].size(); ++b) {
        const double a = analytic.biases[l][b];
        const double n = numeric.biases[l][b];
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}));
      }
    }
  }
  std::cout << "trials: " << trials << "\nmax relative gradient error: "
            << edgesim::format_double(worst) << '\n';
  if (worst >= 1e-4) {
    std::cerr << "error: analytic gradients disagree with finite differences\n";
    return kExitRuntime;
  }
  std::cout << "backprop gradients match finite differences\n";
  return kExitOk;
}

int cmd_sweep(const RunOptions& opts, const std::string& key,
              const std::string& values_csv) {
  nlohmann::json base = nlohmann::json::object();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::invalid_argument("config: cannot open " + opts.config_path);
    in >> base;
  }
  std::string pointer = "/" + key;
  std::replace(pointer.begin(), pointer.end(), '.', '/');

  std::vector<std::string> values;
  std::stringstream ss(values_csv);
  for (std::string item; std::getline(ss, item, ',');) values.push_back(item);
  if (values.empty()) throw std::invalid_argument("config: sweep needs at least one value");

  const std::string out_root = opts.out_dir.empty() ? "out" : opts.out_dir;
  std::ostringstream sweep_csv;
  sweep_csv << "key,value,method,mean_tet,p95_tet,mean_energy,completion_rate,mean_objective\n";
  for (const std::string& value : values) {
    nlohmann::json j = base;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      parsed = value;  // plain string value
    }
    j[nlohmann::json::json_pointer(pointer)] = parsed;
    edgesim::ExperimentConfig cfg = edgesim::config_from_json(j);
    if (opts.seed.has_value()) cfg.seeds = {*opts.seed};
    cfg.output_dir = out_root + "/" + key + "=" + value;
    const edgesim::MetricsReport report = edgesim::run_experiment(cfg);
    edgesim::emit_report(report, cfg.output_dir);
    for (const auto& [method, agg] : report.aggregates) {
      sweep_csv << key << ',' << value << ',' << edgesim::method_name(method) << ','
                << edgesim::format_double(agg.mean_tet) << ','
                << edgesim::format_double(agg.p95_tet) << ','
                << edgesim::format_double(agg.mean_energy) << ','
                << edgesim::format_double(agg.completion_rate) << ','
                << edgesim::format_double(agg.mean_objective) << '\n';
    }
    std::cout << key << "=" << value << " -> " << cfg.output_dir << '\n';
  }
  std::ofstream out(out_root + "/sweep_summary.csv");
  if (!out) throw std::runtime_error("cannot write sweep summary");
  out << sweep_csv.str();
  std::cout << "sweep summary written to " << out_root << "/sweep_summary.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgesim: heterogeneous edge offloading simulation and allocation"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::uint64_t seed_arg = 0;

  CLI::App* run = app.add_subcommand("run", "run the full experiment pipeline");
  run->add_option("--config", run_opts.config_path, "JSON config file");
  CLI::Option* run_seed = run->add_option("--seed", seed_arg, "replace the seed list with one seed");
  run->add_option("--method", run_opts.methods, "method to run (repeatable)");
  run->add_option("--out", run_opts.out_dir, "output directory");

  int oracle_instances = 100;
  std::uint64_t oracle_seed = 1;
  double oracle_step = 1e-3;
  edgesim::SmallInstanceOptions sizes;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "cross-check solve_exact against the exhaustive oracle");
  oracle->add_option("--instances", oracle_instances, "number of random instances");
  oracle->add_option("--seed", oracle_seed, "instance generator seed");
  oracle->add_option("--power-step", oracle_step, "oracle power grid step (W)");
  oracle->add_option("--max-tasks", sizes.max_tasks, "max tasks per instance");
  oracle->add_option("--max-servers", sizes.max_servers, "max servers per instance");
  oracle->add_option("--max-units", sizes.max_units, "max bandwidth units");

  int grad_trials = 10;
  std::uint64_t grad_seed = 1;
  double grad_step = 1e-5;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "audit backprop gradients against finite differences");
  gradcheck->add_option("--trials", grad_trials, "number of network/batch pairs");
  gradcheck->add_option("--seed", grad_seed, "trial generator seed");
  gradcheck->add_option("--step", grad_step, "finite difference step");

  std::string sweep_key;
  std::string sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "vary one scalar config key");
  sweep->add_option("--config", run_opts.config_path, "JSON config file");
  sweep->add_option("--key", sweep_key, "dotted config key, e.g. scenario.n_tasks")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed_arg, "single seed override");
  sweep->add_option("--out", run_opts.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run_seed->count() > 0) run_opts.seed = seed_arg;
      return cmd_run(run_opts);
    }
    if (oracle->parsed()) return cmd_oracle(oracle_instances, oracle_seed, oracle_step, sizes);
    if (gradcheck->parsed()) return cmd_gradcheck(grad_trials, grad_seed, grad_step);
    if (sweep->parsed()) {
      if (sweep_seed->count() > 0) run_opts.seed = seed_arg;
      return cmd_sweep(run_opts, sweep_key, sweep_values);
    }
  } catch (const std::invalid_argument& e) {
    // Config and validation problems.
    std::cerr << "error: " << e.what() << '\n';
    return std::string(e.what()).rfind("config:", 0) == 0 ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
