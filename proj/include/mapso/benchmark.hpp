#pragma once

// Classic test functions, experiment plans and the resumable run harness.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapso/schedules.hpp"
#include "mapso/swarm.hpp"

namespace mapso {

struct TestFunction {
  std::string name;
  std::size_t dimension = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Total on R^d: non-finite intermediate results saturate to the largest double.
  std::function<double(std::span<const double>)> objective;
  std::optional<double> optimum_value;
  std::vector<double> optimum_position;  // empty when unknown

  Problem problem() const;
};

/// sphere, rosenbrock, rastrigin, ackley, griewank, schwefel226 and the shifted
/// variants shifted_sphere .. shifted_griewank. Shift vectors depend only on
/// the function name and the dimension.
std::vector<TestFunction> classic_suite(std::size_t dimension);
std::vector<std::string> classic_suite_names();
/// One member of the classic suite by name; InputError when unknown.
TestFunction classic_function(const std::string& name, std::size_t dimension);

struct NamedSchedule {
  std::string name;
  ScheduleSpec spec;
};

inline constexpr int kPlanSchemaVersion = 1;

struct ExperimentPlan {
  std::vector<NamedSchedule> algorithms;
  std::vector<std::string> functions;  // classic suite names
  std::size_t dimension = 10;
  std::size_t pop_size = 20;
  std::size_t runs = 50;
  std::size_t evals_per_dim = 5000;
  std::uint64_t base_seed = 20190101;

  std::size_t budget_evals() const { return evals_per_dim * dimension; }
  void validate() const;
};

/// MAPSO and the five baselines on the full classic suite, D = 10, 15 runs.
ExperimentPlan default_plan();

/// Seed for run r of algorithm i on function k:
/// mix64(mix64(mix64(base ^ mix64(i)) ^ mix64(k)) ^ mix64(r)) with i, k, r
/// counted from zero.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t algorithm, std::size_t function,
                          std::size_t run) noexcept;

/// Built-in schedule variants serialise as objects with a "type" field;
/// registered schedules as {"type": "registered", "name": ...}.
nlohmann::json schedule_to_json(const ScheduleSpec& spec);
/// Accepts the object form or a bare string naming a registry entry.
ScheduleSpec schedule_from_json(const nlohmann::json& j, const ScheduleRegistry& registry);

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j, const ScheduleRegistry& registry);
ExperimentPlan load_plan(const std::filesystem::path& path, const ScheduleRegistry& registry);

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double best_value = 0.0;
};

/// cells[i][k] holds the records of algorithm i on function k, sorted by run.
struct ResultSet {
  std::vector<std::string> algorithms;
  std::vector<std::string> functions;
  std::size_t runs = 0;
  std::vector<std::vector<std::vector<RunRecord>>> cells;

  std::vector<double> values(std::size_t algorithm, std::size_t function) const;
  std::size_t missing_runs() const;
  bool complete() const { return missing_runs() == 0; }
};

struct RunFailure {
  std::string algorithm;
  std::string function;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentOptions {
  std::size_t parallelism = 1;
  /// Empty: keep everything in memory. Otherwise results are appended under
  /// runs/ as they finish and reloaded on the next call with the same plan.
  std::filesystem::path output_dir;
  /// Stop after this many newly executed runs (the rest stay pending).
  std::optional<std::size_t> max_new_runs;
  std::ostream* log = nullptr;
};

struct ExperimentReport {
  ResultSet results;
  std::vector<RunFailure> failures;
  std::size_t executed = 0;
  std::size_t reused = 0;
};

/// Executes every (algorithm, function, run) not already on disk. Failed runs
/// are listed in the report and in failures.csv, and retried on the next call.
ExperimentReport run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options = {});

/// Reads manifest.json and the per-cell CSVs of a results directory. Missing
/// rows are allowed; check ResultSet::complete().
ResultSet load_results(const std::filesystem::path& dir);

std::string cell_file_name(const std::string& algorithm, const std::string& function);

}  // namespace mapso
