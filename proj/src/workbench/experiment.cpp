#include "flowpart/workbench/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "flowpart/error.hpp"
#include "flowpart/workbench/instance_io.hpp"

namespace flowpart {

using nlohmann::json;

namespace {

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorCode::parse_error, "experiment: " + what); }

Range parse_range(const json& value, const char* name) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    bad_spec(fmt::format("{} must be [lo, hi]", name));
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

GeneratorParams parse_generator(const json& doc) {
  GeneratorParams p;
  for (const auto& [key, value] : doc.items()) {
    auto count = [&] {
      if (!value.is_number_unsigned()) bad_spec(fmt::format("{} must be a non-negative integer", key));
      return value.get<std::size_t>();
    };
    auto real = [&] {
      if (!value.is_number()) bad_spec(fmt::format("{} must be a number", key));
      return value.get<double>();
    };
    if (key == "vertices") p.vertices = count();
    else if (key == "avg_degree") p.avg_degree = real();
    else if (key == "cost") p.cost = parse_range(value, "cost");
    else if (key == "volume") p.volume = parse_range(value, "volume");
    else if (key == "colocation_fraction") p.colocation_fraction = real();
    else if (key == "max_group_size") p.max_group_size = count();
    else if (key == "device_constraint_fraction") p.device_constraint_fraction = real();
    else if (key == "devices") p.devices = count();
    else if (key == "speed") p.speed = parse_range(value, "speed");
    else if (key == "bandwidth") p.bandwidth = parse_range(value, "bandwidth");
    else if (key == "memory") p.memory = parse_range(value, "memory");
    else if (key == "layers") p.layers = count();
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else bad_spec(fmt::format("unknown generator field \"{}\"", key));
  }
  validate(p);
  return p;
}

void check(const ExperimentSpec& spec) {
  if (spec.repetitions == 0) throw Error(ErrorCode::invalid_instance, "repetitions must be at least 1");
  if (spec.partitioners.empty() || spec.schedulers.empty()) {
    throw Error(ErrorCode::invalid_instance, "partitioner and scheduler lists must not be empty");
  }
}

std::string number(double x) { return std::isnan(x) ? "nan" : fmt::format("{}", x); }

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_spec(fmt::format("malformed document at byte {}", e.byte));
  }
  if (!doc.is_object()) bad_spec("expected an object");

  ExperimentSpec spec;
  const auto source = doc.find("instance");
  if (source == doc.end()) bad_spec("missing field \"instance\"");
  if (source->is_string()) spec.instance = source->get<std::string>();
  else if (source->is_object()) spec.instance = parse_generator(*source);
  else bad_spec("instance must be a path or generator parameters");

  for (const auto& [key, value] : doc.items()) {
    if (key == "instance") continue;
    if (key == "partitioners") {
      spec.partitioners.clear();
      for (const auto& name : value) {
        auto s = name.is_string() ? parse_strategy(name.get<std::string>()) : std::nullopt;
        if (!s) bad_spec(fmt::format("unknown partitioner {}", name.dump()));
        spec.partitioners.push_back(*s);
      }
    } else if (key == "schedulers") {
      spec.schedulers.clear();
      for (const auto& name : value) {
        auto p = name.is_string() ? parse_policy(name.get<std::string>()) : std::nullopt;
        if (!p) bad_spec(fmt::format("unknown scheduler {}", name.dump()));
        spec.schedulers.push_back(*p);
      }
    } else if (key == "msr_weights") {
      if (!value.is_array() || value.size() != 4) bad_spec("msr_weights must have four entries");
      spec.msr_weights = {value[0].get<double>(), value[1].get<double>(), value[2].get<double>(),
                          value[3].get<double>()};
    } else if (key == "repetitions") {
      spec.repetitions = value.get<std::size_t>();
    } else if (key == "seed_base") {
      spec.seed_base = value.get<std::uint64_t>();
    } else if (key == "output") {
      spec.output = value.get<std::string>();
    } else if (key == "threads") {
      spec.threads = value.get<std::size_t>();
    } else {
      bad_spec(fmt::format("unknown field \"{}\"", key));
    }
  }
  check(spec);
  return spec;
}

const AggregateRow* ResultTable::find(Strategy partitioner, Policy scheduler) const {
  for (const auto& row : aggregates) {
    if (row.partitioner == partitioner && row.scheduler == scheduler) return &row;
  }
  return nullptr;
}

ResultTable run_experiment(const Instance& instance, const ExperimentSpec& spec, const RunObserver& observer) {
  check(spec);
  const auto groups = build_groups(instance.graph);
  const std::size_t schedulers = spec.schedulers.size();
  const std::size_t reps = spec.repetitions;
  const std::size_t tasks = spec.partitioners.size() * reps;

  ResultTable table;
  table.rows.resize(tasks * schedulers);
  std::mutex observer_lock;

  // One task partitions once and simulates every scheduler on the result.
  auto run_task = [&](std::size_t task) {
    const std::size_t pi = task / reps;
    const std::size_t rep = task % reps;
    const Strategy strategy = spec.partitioners[pi];
    const std::uint64_t seed = spec.seed_base + rep;
    auto row_at = [&](std::size_t si) -> RunRow& { return table.rows[(pi * schedulers + si) * reps + rep]; };
    for (std::size_t si = 0; si < schedulers; ++si) {
      row_at(si) = {strategy, spec.schedulers[si], rep, seed, false, std::numeric_limits<double>::quiet_NaN(), 0,
                    std::numeric_limits<double>::quiet_NaN(), ""};
    }

    std::optional<Partition> partition;
    try {
      partition = make_partition(strategy, instance.graph, instance.cluster, groups, seed);
    } catch (const Error& e) {
      for (std::size_t si = 0; si < schedulers; ++si) row_at(si).error = e.what();
      return;
    }
    for (std::size_t si = 0; si < schedulers; ++si) {
      RunRow& row = row_at(si);
      try {
        const auto result =
            sim::run(instance.graph, instance.cluster, *partition, row.scheduler, spec.msr_weights, seed);
        row.ok = true;
        row.makespan = result.report.makespan;
        row.peak_memory_violations = result.report.memory_violations.size();
        row.mean_utilization = result.report.mean_utilization();
        if (observer) {
          std::lock_guard guard(observer_lock);
          observer({row, *partition, result});
        }
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.threads, tasks));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks;) run_task(t);
      });
    }
  }

  for (std::size_t cell = 0; cell * reps < table.rows.size(); ++cell) {
    AggregateRow agg{table.rows[cell * reps].partitioner, table.rows[cell * reps].scheduler};
    agg.runs = reps;
    double sum = 0.0, utilization = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& row = table.rows[cell * reps + r];
      if (!row.ok) continue;
      ++ok;
      sum += row.makespan;
      utilization += row.mean_utilization;
    }
    agg.failed = reps - ok;
    if (ok == 0) {
      agg.mean_makespan = agg.stddev_makespan = agg.mean_utilization = std::numeric_limits<double>::quiet_NaN();
    } else {
      agg.mean_makespan = sum / static_cast<double>(ok);
      agg.mean_utilization = utilization / static_cast<double>(ok);
      // Shifted by the first value so identical runs give exactly zero.
      double shift = 0.0, shifted = 0.0, squares = 0.0;
      bool first = true;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& row = table.rows[cell * reps + r];
        if (!row.ok) continue;
        if (first) shift = row.makespan, first = false;
        shifted += row.makespan - shift;
        squares += (row.makespan - shift) * (row.makespan - shift);
      }
      const double k = static_cast<double>(ok);
      agg.stddev_makespan = ok > 1 ? std::sqrt(std::max(0.0, (squares - shifted * shifted / k) / (k - 1))) : 0.0;
    }
    table.aggregates.push_back(agg);
  }
  return table;
}

ResultTable run_experiment(const ExperimentSpec& spec, const RunObserver& observer) {
  check(spec);
  const Instance instance = std::holds_alternative<std::string>(spec.instance)
                                ? load_instance(std::get<std::string>(spec.instance))
                                : generate_instance(std::get<GeneratorParams>(spec.instance));
  auto table = run_experiment(instance, spec, observer);
  if (!spec.output.empty()) write_results(table, spec.output);
  return table;
}

std::string raw_csv(const ResultTable& table) {
  std::string out = std::string(raw_csv_header) + "\n";
  for (const auto& row : table.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(row.partitioner), to_string(row.scheduler),
                       row.repetition, row.seed, number(row.makespan), row.peak_memory_violations,
                       number(row.mean_utilization));
  }
  return out;
}

std::string summary_csv(const ResultTable& table) {
  std::string out = std::string(summary_csv_header) + "\n";
  for (const auto& row : table.aggregates) {
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(row.partitioner), to_string(row.scheduler), row.runs,
                       row.failed, number(row.mean_makespan), number(row.stddev_makespan),
                       number(row.mean_utilization));
  }
  return out;
}

void write_results(const ResultTable& table, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  write_file((dir / "raw.csv").string(), raw_csv(table));
  write_file((dir / "summary.csv").string(), summary_csv(table));
}

}  // namespace flowpart
