#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "flowpart/partition.hpp"
#include "flowpart/sched.hpp"
#include "flowpart/simulate.hpp"
#include "flowpart/workbench/generator.hpp"
#include "flowpart/workbench/instance.hpp"

namespace flowpart {

struct ExperimentSpec {
  std::variant<std::string, GeneratorParams> instance;  // file path or generator input
  std::vector<Strategy> partitioners{std::begin(all_strategies), std::end(all_strategies)};
  std::vector<Policy> schedulers{std::begin(all_policies), std::end(all_policies)};
  MsrWeights msr_weights;
  std::size_t repetitions = 10;
  std::uint64_t seed_base = 0;
  std::string output;  // directory for raw.csv / summary.csv; empty writes nothing
  std::size_t threads = 1;
};

/// Parses a JSON experiment description; see README for the schema.
ExperimentSpec parse_experiment_spec(const std::string& text);

struct RunRow {
  Strategy partitioner;
  Policy scheduler;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double makespan = 0.0;
  std::size_t peak_memory_violations = 0;
  double mean_utilization = 0.0;
  std::string error;
};

struct AggregateRow {
  Strategy partitioner;
  Policy scheduler;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double mean_makespan = 0.0;
  double stddev_makespan = 0.0;  // sample standard deviation
  double mean_utilization = 0.0;
};

struct ResultTable {
  std::vector<RunRow> rows;            // ordered by (partitioner, scheduler, repetition)
  std::vector<AggregateRow> aggregates;  // ordered by (partitioner, scheduler)

  const AggregateRow* find(Strategy partitioner, Policy scheduler) const;
};

/// Everything a finished matrix cell produced, for callers that inspect
/// traces. Invoked once per successful run, never concurrently.
struct RunRecord {
  const RunRow& row;
  const Partition& partition;
  const sim::SimResult& result;
};
using RunObserver = std::function<void(const RunRecord&)>;

/// Runs every (partitioner, scheduler, repetition) cell with seed
/// seed_base + repetition for both partitioning and simulation. Infeasible
/// cells are recorded as failed rows. Validates the experiment and throws
/// Error(invalid_instance) on zero repetitions or empty strategy lists.
ResultTable run_experiment(const Instance& instance, const ExperimentSpec& spec, const RunObserver& observer = {});
/// Loads or generates the instance, runs, and writes CSVs if spec.output is set.
ResultTable run_experiment(const ExperimentSpec& spec, const RunObserver& observer = {});

inline constexpr const char* raw_csv_header =
    "partitioner,scheduler,repetition,seed,makespan,peak_memory_violations,mean_utilization";
inline constexpr const char* summary_csv_header =
    "partitioner,scheduler,runs,failed,mean_makespan,stddev_makespan,mean_utilization";

std::string raw_csv(const ResultTable& table);
std::string summary_csv(const ResultTable& table);
void write_results(const ResultTable& table, const std::string& directory);

}  // namespace flowpart
