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

#include "edgesim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "edgesim/format.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {
namespace {

// Default forecaster architecture: 8 features in, 3 demand components out.
const std::vector<int> kDefaultLayers{kFeatureCount, 32, 16, 3};

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

double require_number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) config_error(path + " must be a number");
  return v.get<double>();
}

int require_int(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer()) config_error(path + " must be an integer");
  return v.get<int>();
}

std::pair<double, double> require_range(const nlohmann::json& v,
                                        const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error(path + " must be a [low, high] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

void apply_scenario(ScenarioConfig& s, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = "scenario." + key;
    if (key == "n_tasks") s.n_tasks = require_int(value, path);
    else if (key == "special_prob") s.special_prob = require_number(value, path);
    else if (key == "mean_data_bytes") s.mean_data_bytes = require_number(value, path);
    else if (key == "mean_cycles") s.mean_cycles = require_number(value, path);
    else if (key == "sensitivity_range") {
      std::tie(s.sensitivity_low, s.sensitivity_high) = require_range(value, path);
    } else if (key == "rate_range") {
      std::tie(s.rate_low, s.rate_high) = require_range(value, path);
    } else if (key == "bandwidth_units_total") {
      s.bandwidth_units_total = require_int(value, path);
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        config_error(path + " must be an integer");
      }
      s.seed = value.get<std::uint64_t>();
    } else if (key == "trace_length") s.trace_length = require_int(value, path);
    else if (key == "window_k") s.window_k = require_int(value, path);
    else config_error("unknown key \"" + path + "\"");
  }
}

void apply_train(TrainConfig& t, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = "train." + key;
    if (key == "learning_rate") t.learning_rate = require_number(value, path);
    else if (key == "epochs") t.epochs = require_int(value, path);
    else if (key == "batch_size") t.batch_size = require_int(value, path);
    else if (key == "seed") t.seed = value.get<std::uint64_t>();
    else if (key == "normalize") {
      if (!value.is_boolean()) config_error(path + " must be a boolean");
      t.normalize = value.get<bool>();
    } else config_error("unknown key \"" + path + "\"");
  }
}

void apply_solver(SolverConfig& s, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = "solver." + key;
    if (key == "exact_limit") s.exact_limit = value.get<long long>();
    else if (key == "tol") s.tol = require_number(value, path);
    else if (key == "max_sweeps") s.max_sweeps = require_int(value, path);
    else if (key == "max_iters") s.max_iters = require_int(value, path);
    else config_error("unknown key \"" + path + "\"");
  }
}

void apply_cost(CostParams& c, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = "cost." + key;
    if (key == "local_capacity") c.local_capacity = require_number(value, path);
    else if (key == "kappa") c.kappa = require_number(value, path);
    else if (key == "gpu_special_efficiency") {
      c.gpu_special_efficiency = require_number(value, path);
    } else if (key == "power_min") c.power_min = require_number(value, path);
    else if (key == "power_max") c.power_max = require_number(value, path);
    else config_error("unknown key \"" + path + "\"");
  }
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct TetEnergyRows {
  std::vector<double> tet;
  std::vector<double> energy;
};

double nearest_rank_p95(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  return values[rank == 0 ? 0 : rank - 1];
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot open " + file.string() + " for writing");
  }
  return out;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioConfig{};
  cfg.train = TrainConfig{};
  cfg.solver = SolverConfig{};
  cfg.cost = CostParams{};
  for (int i = 0; i < 5; ++i) {
    cfg.servers.push_back({i, ServerKind::Cpu, 9.0, 0.1});
  }
  for (int i = 5; i < 10; ++i) {
    cfg.servers.push_back({i, ServerKind::Gpu, 100.0, 1.0});
  }
  cfg.methods = {Method::Heuristic, Method::Dld, Method::Mec, Method::Gsa};
  cfg.seeds.resize(30);
  std::iota(cfg.seeds.begin(), cfg.seeds.end(), 1);
  return cfg;
}

ExperimentConfig config_from_json(const nlohmann::json& overrides) {
  if (!overrides.is_object()) config_error("top level must be a JSON object");
  ExperimentConfig cfg = default_config();
  for (const auto& [key, value] : overrides.items()) {
    if (key == "scenario") apply_scenario(cfg.scenario, value);
    else if (key == "train") apply_train(cfg.train, value);
    else if (key == "solver") apply_solver(cfg.solver, value);
    else if (key == "cost") apply_cost(cfg.cost, value);
    else if (key == "servers") {
      cfg.servers = value.get<std::vector<ServerSpec>>();
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& name : value) {
        const auto m = method_from_name(name.get<std::string>());
        if (!m.has_value()) {
          config_error("unknown method \"" + name.get<std::string>() + "\"");
        }
        cfg.methods.push_back(*m);
      }
    } else if (key == "seeds") {
      if (!value.is_array()) config_error("seeds must be an array");
      cfg.seeds.clear();
      for (const auto& s : value) {
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
          config_error("seeds must be non-negative integers");
        }
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    } else if (key == "deadline_min") {
      cfg.deadline_min = require_number(value, "deadline_min");
    } else if (key == "deadline_max") {
      cfg.deadline_max = require_number(value, "deadline_max");
    } else if (key == "output_dir") {
      cfg.output_dir = value.get<std::string>();
    } else {
      config_error("unknown key \"" + key + "\"");
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("config: cannot open " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: parse error in " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) config_error("methods must be non-empty");
  if (cfg.seeds.empty()) config_error("seeds must be non-empty");
  if (!(cfg.deadline_min < cfg.deadline_max)) {
    config_error("deadline_min must be < deadline_max");
  }
  if (cfg.scenario.n_tasks < 0) config_error("scenario.n_tasks must be >= 0");
  if (cfg.scenario.special_prob < 0.0 || cfg.scenario.special_prob > 1.0) {
    config_error("scenario.special_prob must be in [0, 1]");
  }
  if (cfg.scenario.sensitivity_low > cfg.scenario.sensitivity_high) {
    config_error("scenario.sensitivity_range must be ordered");
  }
  if (cfg.scenario.rate_low > cfg.scenario.rate_high) {
    config_error("scenario.rate_range must be ordered");
  }
  if (cfg.scenario.window_k < 1) config_error("scenario.window_k must be >= 1");
  if (cfg.scenario.trace_length < cfg.scenario.window_k + 1) {
    config_error("scenario.trace_length must exceed window_k");
  }
  if (cfg.scenario.bandwidth_units_total < 1) {
    config_error("scenario.bandwidth_units_total must be >= 1");
  }
  if (cfg.train.learning_rate < 0.0) config_error("train.learning_rate must be >= 0");
  if (cfg.train.epochs < 1) config_error("train.epochs must be >= 1");
  if (cfg.train.batch_size < 1) config_error("train.batch_size must be >= 1");
  if (cfg.solver.exact_limit < 1) config_error("solver.exact_limit must be >= 1");
  if (cfg.solver.max_sweeps < 1) config_error("solver.max_sweeps must be >= 1");
  if (cfg.solver.max_iters < 0) config_error("solver.max_iters must be >= 0");
  try {
    validate(cfg.cost);
    for (const ServerSpec& s : cfg.servers) validate(s);
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = {
      {"n_tasks", cfg.scenario.n_tasks},
      {"special_prob", cfg.scenario.special_prob},
      {"mean_data_bytes", cfg.scenario.mean_data_bytes},
      {"mean_cycles", cfg.scenario.mean_cycles},
      {"sensitivity_range", {cfg.scenario.sensitivity_low, cfg.scenario.sensitivity_high}},
      {"rate_range", {cfg.scenario.rate_low, cfg.scenario.rate_high}},
      {"bandwidth_units_total", cfg.scenario.bandwidth_units_total},
      {"seed", cfg.scenario.seed},
      {"trace_length", cfg.scenario.trace_length},
      {"window_k", cfg.scenario.window_k},
  };
  j["train"] = {
      {"learning_rate", cfg.train.learning_rate},
      {"epochs", cfg.train.epochs},
      {"batch_size", cfg.train.batch_size},
      {"seed", cfg.train.seed},
      {"normalize", cfg.train.normalize},
  };
  j["solver"] = {
      {"exact_limit", cfg.solver.exact_limit},
      {"tol", cfg.solver.tol},
      {"max_sweeps", cfg.solver.max_sweeps},
      {"max_iters", cfg.solver.max_iters},
  };
  j["cost"] = cfg.cost;
  j["servers"] = cfg.servers;
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["seeds"] = cfg.seeds;
  j["deadline_min"] = cfg.deadline_min;
  j["deadline_max"] = cfg.deadline_max;
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::uint64_t h = fnv1a64(config_to_json(cfg).dump());
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

double completion_rate(std::span<const TaskSpec> tasks,
                       std::span<const CostBreakdown> costs) {
  if (tasks.size() != costs.size()) {
    throw std::invalid_argument("completion_rate: length mismatch");
  }
  if (tasks.empty()) return 1.0;
  int met = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (costs[i].tet <= tasks[i].deadline) ++met;
  }
  return static_cast<double>(met) / static_cast<double>(tasks.size());
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  MetricsReport report;
  report.config_hash = config_hash(cfg);
  report.seeds = cfg.seeds;
  report.methods = cfg.methods;

  double total_cpu = 0.0;
  double total_gpu = 0.0;
  for (const ServerSpec& s : cfg.servers) {
    (s.kind == ServerKind::Cpu ? total_cpu : total_gpu) += s.capacity;
  }

  TaskGenOptions task_opts;
  task_opts.deadline_min = cfg.deadline_min;
  task_opts.deadline_max = cfg.deadline_max;

  for (const std::uint64_t seed : cfg.seeds) {
    ProblemInstance instance;
    try {
      ScenarioConfig scenario = cfg.scenario;
      scenario.seed = seed;
      Rng rng(seed);
      std::vector<TaskSpec> tasks = generate_tasks(scenario, rng, task_opts);
      const std::vector<RawSample> trace = generate_trace(scenario, rng);
      const std::vector<DatasetPair> dataset =
          build_dataset(trace, scenario.window_k, scenario, total_cpu, total_gpu);

      NetworkParams net = init_params(kDefaultLayers, mix_seed(cfg.train.seed, seed));
      TrainConfig tcfg = cfg.train;
      tcfg.seed = mix_seed(cfg.train.seed ^ 0x5bd1e995u, seed);
      TrainResult trained = train(std::move(net), dataset, tcfg);

      const FeatureVector features = extract_features(
          trace, scenario.trace_length - 1, scenario.window_k);
      const DemandVector predicted = predict_demand(trained.params, features);
      const ReservedCapacity reserved = reserve_capacity(
          cfg.servers, scenario.bandwidth_units_total, predicted);

      instance.tasks = std::move(tasks);
      instance.servers = reserved.servers;
      instance.cost = cfg.cost;
      instance.bandwidth_units = reserved.bandwidth_units;
      instance.reservation = predicted;
      instance.over_demand = reserved.over_demand;

      report.seed_info.push_back({seed, predicted, reserved.over_demand,
                                  trained.loss_history.back()});
    } catch (const std::exception& e) {
      report.errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
      continue;
    }

    for (const Method method : cfg.methods) {
      try {
        const SolveResult res = solve(instance, method, cfg.solver);
        validate_allocation(instance, res.allocation);
        RunRecord rec;
        rec.seed = seed;
        rec.method = method;
        rec.objective = res.objective;
        rec.completion = completion_rate(instance.tasks, res.per_task_costs);
        rec.iterations = res.iterations;
        rec.tasks.reserve(instance.tasks.size());
        for (std::size_t i = 0; i < instance.tasks.size(); ++i) {
          const TaskSpec& task = instance.tasks[i];
          const CostBreakdown& cost = res.per_task_costs[i];
          rec.tasks.push_back({task.id, cost.tet, cost.energy, task.deadline,
                               cost.tet <= task.deadline});
        }
        report.runs.push_back(std::move(rec));
      } catch (const std::exception& e) {
        report.errors.push_back("seed " + std::to_string(seed) + " method " +
                                method_name(method) + ": " + e.what());
      }
    }
  }

  for (const Method method : cfg.methods) {
    TetEnergyRows rows;
    double completion_sum = 0.0;
    double objective_sum = 0.0;
    int n_runs = 0;
    for (const RunRecord& rec : report.runs) {
      if (rec.method != method) continue;
      ++n_runs;
      completion_sum += rec.completion;
      objective_sum += rec.objective;
      for (const TaskMetric& t : rec.tasks) {
        rows.tet.push_back(t.tet);
        rows.energy.push_back(t.energy);
      }
    }
    if (n_runs == 0) continue;
    MethodAggregate agg;
    agg.runs = n_runs;
    agg.completion_rate = completion_sum / n_runs;
    agg.mean_objective = objective_sum / n_runs;
    if (!rows.tet.empty()) {
      agg.mean_tet = std::accumulate(rows.tet.begin(), rows.tet.end(), 0.0) /
                     static_cast<double>(rows.tet.size());
      agg.min_tet = *std::min_element(rows.tet.begin(), rows.tet.end());
      agg.max_tet = *std::max_element(rows.tet.begin(), rows.tet.end());
      agg.p95_tet = nearest_rank_p95(rows.tet);
      agg.mean_energy =
          std::accumulate(rows.energy.begin(), rows.energy.end(), 0.0) /
          static_cast<double>(rows.energy.size());
      agg.min_energy = *std::min_element(rows.energy.begin(), rows.energy.end());
      agg.max_energy = *std::max_element(rows.energy.begin(), rows.energy.end());
      agg.p95_energy = nearest_rank_p95(rows.energy);
    }
    report.aggregates.emplace_back(method, agg);
  }
  return report;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["format_version"] = report.format_version;
  j["config_hash"] = report.config_hash;
  j["seeds"] = report.seeds;
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : report.methods) methods.push_back(method_name(m));
  j["methods"] = methods;

  nlohmann::json seed_info = nlohmann::json::array();
  for (const SeedInfo& s : report.seed_info) {
    seed_info.push_back({{"seed", s.seed},
                         {"predicted_demand", s.predicted},
                         {"over_demand", s.over_demand},
                         {"train_final_loss", s.train_final_loss}});
  }
  j["seed_info"] = seed_info;

  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& rec : report.runs) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const TaskMetric& t : rec.tasks) {
      tasks.push_back({{"task_id", t.task_id},
                       {"tet_s", t.tet},
                       {"energy_j", t.energy},
                       {"deadline_s", t.deadline},
                       {"met_deadline", t.met}});
    }
    runs.push_back({{"seed", rec.seed},
                    {"method", method_name(rec.method)},
                    {"objective", rec.objective},
                    {"completion_rate", rec.completion},
                    {"iterations", rec.iterations},
                    {"tasks", tasks}});
  }
  j["runs"] = runs;

  nlohmann::json aggregates;
  for (const auto& [method, agg] : report.aggregates) {
    aggregates[method_name(method)] = {
        {"runs", agg.runs},
        {"mean_tet", agg.mean_tet},
        {"min_tet", agg.min_tet},
        {"max_tet", agg.max_tet},
        {"p95_tet", agg.p95_tet},
        {"mean_energy", agg.mean_energy},
        {"min_energy", agg.min_energy},
        {"max_energy", agg.max_energy},
        {"p95_energy", agg.p95_energy},
        {"completion_rate", agg.completion_rate},
        {"mean_objective", agg.mean_objective},
    };
  }
  j["aggregates"] = aggregates;
  j["errors"] = report.errors;
  return j;
}

void emit_report(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream out = open_out(dir / "per_task.csv");
    out << "seed,method,task_id,tet_s,energy_j,deadline_s,met_deadline\n";
    for (const RunRecord& rec : report.runs) {
      for (const TaskMetric& t : rec.tasks) {
        out << rec.seed << ',' << method_name(rec.method) << ',' << t.task_id
            << ',' << format_double(t.tet) << ',' << format_double(t.energy)
            << ',' << format_double(t.deadline) << ',' << (t.met ? 1 : 0)
            << '\n';
      }
    }
  }

  {
    std::ofstream out = open_out(dir / "summary.csv");
    out << "method,mean_tet,p95_tet,mean_energy,completion_rate,mean_objective\n";
    for (const auto& [method, agg] : report.aggregates) {
      out << method_name(method) << ',' << format_double(agg.mean_tet) << ','
          << format_double(agg.p95_tet) << ',' << format_double(agg.mean_energy)
          << ',' << format_double(agg.completion_rate) << ','
          << format_double(agg.mean_objective) << '\n';
    }
  }

  {
    std::ofstream out = open_out(dir / "report.json");
    out << report_to_json(report).dump(2) << '\n';
  }
}

}  // namespace edgesim
