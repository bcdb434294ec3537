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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edgesim/harness.hpp"

using namespace edgesim;

namespace {

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

nlohmann::json small_config_json() {
  return nlohmann::json{
      {"scenario", {{"n_tasks", 4}, {"trace_length", 40}, {"bandwidth_units_total", 12}}},
      {"train", {{"epochs", 10}}},
      {"methods", {"exact", "heuristic", "dld", "mec", "gsa"}},
      {"seeds", {1, 2}},
  };
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

}  // namespace

TEST_CASE("config defaults and merging") {
  SUBCASE("empty object yields the built-in defaults") {
    const ExperimentConfig cfg = config_from_json(nlohmann::json::object());
    CHECK(cfg.scenario.n_tasks == 15);
    CHECK(cfg.scenario.special_prob == 0.7);
    CHECK(cfg.scenario.bandwidth_units_total == 50);
    CHECK(cfg.scenario.mean_data_bytes == 420000.0);
    REQUIRE(cfg.servers.size() == 10);
    CHECK(cfg.servers[0].kind == ServerKind::Cpu);
    CHECK(cfg.servers[0].capacity == 9.0);
    CHECK(cfg.servers[9].kind == ServerKind::Gpu);
    CHECK(cfg.servers[9].capacity == 100.0);
    CHECK(cfg.seeds.size() == 30);
    CHECK(cfg.methods.size() == 4);
    CHECK(cfg.deadline_min == 0.2);
    CHECK(cfg.deadline_max == 2.0);
  }
  SUBCASE("overriding one field keeps the rest") {
    const ExperimentConfig cfg =
        config_from_json({{"scenario", {{"n_tasks", 3}}}});
    CHECK(cfg.scenario.n_tasks == 3);
    CHECK(cfg.scenario.special_prob == 0.7);
    CHECK(cfg.scenario.bandwidth_units_total == 50);
    CHECK(cfg.seeds.size() == 30);
  }
  SUBCASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(config_from_json({{"ntasks", 3}}),
                         doctest::Contains("ntasks"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_json({{"scenario", {{"tasks", 3}}}}),
                         doctest::Contains("scenario.tasks"), std::invalid_argument);
  }
  SUBCASE("invariant violations are diagnosed") {
    CHECK_THROWS_WITH_AS(
        config_from_json({{"deadline_min", 3.0}}),
        doctest::Contains("deadline_min"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_json({{"methods", nlohmann::json::array()}}),
                         doctest::Contains("methods"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_json({{"methods", {"sa"}}}),
                         doctest::Contains("sa"), std::invalid_argument);
  }
  SUBCASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::invalid_argument);
  }
  SUBCASE("hash changes iff the config changes") {
    const ExperimentConfig a = config_from_json(nlohmann::json::object());
    const ExperimentConfig b = config_from_json(nlohmann::json::object());
    ExperimentConfig c = config_from_json({{"scenario", {{"n_tasks", 3}}}});
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
  }
}

TEST_CASE("completion_rate") {
  std::vector<TaskSpec> tasks(4);
  for (int i = 0; i < 4; ++i) {
    tasks[static_cast<std::size_t>(i)].id = i;
    tasks[static_cast<std::size_t>(i)].deadline = 1.0;
  }
  std::vector<CostBreakdown> costs(4);
  for (auto& c : costs) c.tet = 0.5;

  SUBCASE("all tasks inside their deadlines") {
    CHECK(completion_rate(tasks, costs) == 1.0);
  }
  SUBCASE("three of four") {
    costs[2].tet = 2.0;
    CHECK(completion_rate(tasks, costs) == doctest::Approx(0.75));
  }
  SUBCASE("zero tasks count as full completion") {
    CHECK(completion_rate(std::vector<TaskSpec>{}, std::vector<CostBreakdown>{}) == 1.0);
  }
  SUBCASE("length mismatch throws") {
    costs.pop_back();
    CHECK_THROWS_AS(completion_rate(tasks, costs), std::invalid_argument);
  }
}

TEST_CASE("run_experiment") {
  SUBCASE("produces one run per seed and method") {
    const ExperimentConfig cfg = config_from_json(small_config_json());
    const MetricsReport report = run_experiment(cfg);
    CHECK(report.errors.empty());
    CHECK(report.runs.size() == 10);  // 5 methods x 2 seeds
    CHECK(report.seed_info.size() == 2);
    for (const RunRecord& rec : report.runs) {
      CHECK(rec.tasks.size() == 4);
      CHECK(rec.completion >= 0.0);
      CHECK(rec.completion <= 1.0);
    }
    CHECK(report.aggregates.size() == 5);
  }
  SUBCASE("oversized exact runs are recorded as errors, others proceed") {
    nlohmann::json j = {
        {"train", {{"epochs", 3}}},
        {"methods", {"exact", "dld"}},
        {"seeds", {1}},
    };
    const MetricsReport report = run_experiment(config_from_json(j));
    REQUIRE(report.errors.size() == 1);
    CHECK(report.errors[0].find("exact") != std::string::npos);
    CHECK(report.runs.size() == 1);  // dld still ran
    CHECK(report.runs[0].method == Method::Dld);
  }
}

TEST_CASE("emit_report") {
  const ExperimentConfig cfg = config_from_json(small_config_json());
  const MetricsReport report = run_experiment(cfg);

  const auto dir = std::filesystem::temp_directory_path() / "edgesim_harness_test";
  std::filesystem::remove_all(dir);
  emit_report(report, dir);

  SUBCASE("files exist with the documented headers") {
    const std::string per_task = slurp(dir / "per_task.csv");
    CHECK(per_task.rfind("seed,method,task_id,tet_s,energy_j,deadline_s,met_deadline\n", 0) == 0);
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("method,mean_tet,p95_tet,mean_energy,completion_rate,mean_objective\n", 0) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(j.at("format_version") == 1);
    CHECK(j.at("config_hash") == report.config_hash);
  }

  SUBCASE("summary objective is recomputable from per-task rows") {
    std::istringstream lines(slurp(dir / "per_task.csv"));
    std::string line;
    std::getline(lines, line);  // header
    // objective per (method, seed) from alpha=0.8, beta=0.2 weighted rows
    std::map<std::string, std::map<std::string, double>> objective;
    while (std::getline(lines, line)) {
      const auto cells = split(line, ',');
      REQUIRE(cells.size() == 7);
      objective[cells[1]][cells[0]] += 0.8 * std::stod(cells[3]) + 0.2 * std::stod(cells[4]);
    }
    std::istringstream slines(slurp(dir / "summary.csv"));
    std::getline(slines, line);  // header
    while (std::getline(slines, line)) {
      const auto cells = split(line, ',');
      REQUIRE(cells.size() == 6);
      const auto& per_seed = objective.at(cells[0]);
      double mean = 0.0;
      for (const auto& [seed, obj] : per_seed) mean += obj;
      mean /= static_cast<double>(per_seed.size());
      CHECK(std::abs(mean - std::stod(cells[5])) < 1e-9);
    }
  }

  SUBCASE("emission is byte deterministic") {
    const auto dir2 = std::filesystem::temp_directory_path() / "edgesim_harness_test2";
    std::filesystem::remove_all(dir2);
    const MetricsReport report2 = run_experiment(cfg);
    emit_report(report2, dir2);
    CHECK(slurp(dir / "per_task.csv") == slurp(dir2 / "per_task.csv"));
    CHECK(slurp(dir / "summary.csv") == slurp(dir2 / "summary.csv"));
    CHECK(slurp(dir / "report.json") == slurp(dir2 / "report.json"));
    std::filesystem::remove_all(dir2);
  }

  std::filesystem::remove_all(dir);
}
