#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "flowpart/constraints.hpp"
#include "flowpart/error.hpp"
#include "flowpart/oracle.hpp"
#include "flowpart/partition.hpp"
#include "flowpart/simulate.hpp"
#include "flowpart/workbench/experiment.hpp"
#include "flowpart/workbench/generator.hpp"
#include "flowpart/workbench/instance_io.hpp"

namespace fp = flowpart;
namespace fs = std::filesystem;

namespace {

fp::MsrWeights parse_weights(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fp::Error(fp::ErrorCode::parse_error, fmt::format("bad --msr-weights entry \"{}\"", item));
    }
  }
  if (values.size() != 4) throw fp::Error(fp::ErrorCode::parse_error, "--msr-weights takes a,b,g,d");
  return {values[0], values[1], values[2], values[3]};
}

void print_violations(const fp::ViolationList& violations) {
  for (const auto& v : violations) fmt::print("  {}: {}\n", fp::to_string(v.kind), v.message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioning and scheduling workbench for dataflow graphs"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string weights_text = "1,1,1,5";
  std::size_t devices = 50;
  std::string out;
  std::string instance_path;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  fp::GeneratorParams params;
  gen->add_option("--vertices", params.vertices, "Vertex count")->capture_default_str();
  gen->add_option("--avg-degree", params.avg_degree, "Edges per vertex")->capture_default_str();
  gen->add_option("--colocation", params.colocation_fraction, "Share of collocated vertices")->capture_default_str();
  gen->add_option("--pinned", params.device_constraint_fraction, "Share of device-constrained vertices")
      ->capture_default_str();
  gen->add_option("--devices", devices, "Device count")->capture_default_str();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--out", out, "Instance file")->required();

  auto* validate = app.add_subcommand("validate", "Check an instance (and optionally an assignment)");
  std::string partition_path;
  validate->add_option("instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  validate->add_option("--partition", partition_path, "Assignment file")->check(CLI::ExistingFile);
  validate->add_option("--out", out, "Write the report as JSON");

  auto* partition = app.add_subcommand("partition", "Partition an instance");
  std::string strategy_name = "critical_path";
  partition->add_option("instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  partition->add_option("--strategy", strategy_name, "hash|batch_split|critical_path|mite|dfs|heft")
      ->capture_default_str();
  partition->add_option("--seed", seed, "Seed for the hash strategy")->capture_default_str();
  partition->add_option("--out", out, "Assignment file")->required();

  auto* simulate = app.add_subcommand("simulate", "Simulate one iteration of a partitioned graph");
  std::string policy_name = "pct";
  simulate->add_option("instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  simulate->add_option("partition", partition_path, "Assignment file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--policy", policy_name, "fifo|pct|msr")->capture_default_str();
  simulate->add_option("--msr-weights", weights_text, "alpha,beta,gamma,delta")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed for FIFO tie-breaks")->capture_default_str();
  simulate->add_option("--out", out, "Directory for trace.txt and report.json")->required();

  auto* compare = app.add_subcommand("compare", "Run an experiment matrix");
  std::string spec_path;
  std::optional<std::uint64_t> seed_base;
  std::optional<std::size_t> device_override;
  std::optional<std::string> weights_override;
  compare->add_option("spec", spec_path, "Experiment file")->required()->check(CLI::ExistingFile);
  compare->add_option("--seed", seed_base, "Seed base (overrides the file)");
  compare->add_option("--devices", device_override, "Device count for generated instances");
  compare->add_option("--msr-weights", weights_override, "alpha,beta,gamma,delta");
  compare->add_option("--out", out, "Output directory (overrides the file)");

  auto* oracle = app.add_subcommand("oracle", "Optimal makespan of a small instance");
  oracle->add_option("instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--out", out, "Write the optimal assignment");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      params.devices = devices;
      params.seed = seed;
      const auto instance = fp::generate_instance(params);
      fp::save_instance(instance, out);
      fmt::print("{} vertices, {} edges, {} devices -> {}\n", instance.graph.num_vertices(),
                 instance.graph.num_edges(), instance.cluster.size(), out);
      return 0;
    }

    if (*validate) {
      const auto instance = fp::load_instance(instance_path);
      const auto groups = fp::build_groups(instance.graph);
      fp::ViolationList violations;
      if (!partition_path.empty()) {
        const auto assignment = fp::parse_partition(fp::read_file(partition_path), instance);
        violations = fp::check_partition(instance.graph, instance.cluster, groups, assignment);
      }
      fmt::print("{} vertices, {} edges, {} collocation groups, {} devices\n", instance.graph.num_vertices(),
                 instance.graph.num_edges(), groups.size(), instance.cluster.size());
      if (!out.empty()) {
        nlohmann::ordered_json doc;
        doc["valid"] = violations.empty();
        doc["violations"] = nlohmann::ordered_json::array();
        for (const auto& v : violations) {
          doc["violations"].push_back({{"kind", fp::to_string(v.kind)}, {"message", v.message}});
        }
        fp::write_file(out, doc.dump(1) + "\n");
      }
      if (violations.empty()) {
        fmt::print("valid\n");
        return 0;
      }
      fmt::print("{} violation(s)\n", violations.size());
      print_violations(violations);
      return 1;
    }

    if (*partition) {
      const auto strategy = fp::parse_strategy(strategy_name);
      if (!strategy) throw fp::Error(fp::ErrorCode::parse_error, fmt::format("unknown strategy {}", strategy_name));
      const auto instance = fp::load_instance(instance_path);
      const auto groups = fp::build_groups(instance.graph);
      const auto result = fp::make_partition(*strategy, instance.graph, instance.cluster, groups, seed);
      fp::write_file(out, fp::dump_partition(result, instance));
      std::vector<std::size_t> per_device(instance.cluster.size(), 0);
      for (auto d : result.assignment) ++per_device[d];
      const auto used = std::count_if(per_device.begin(), per_device.end(), [](auto c) { return c > 0; });
      fmt::print("{}: {} vertices on {} of {} devices -> {}\n", strategy_name, result.assignment.size(), used,
                 instance.cluster.size(), out);
      return 0;
    }

    if (*simulate) {
      const auto policy = fp::parse_policy(policy_name);
      if (!policy) throw fp::Error(fp::ErrorCode::parse_error, fmt::format("unknown policy {}", policy_name));
      const auto instance = fp::load_instance(instance_path);
      const auto assignment = fp::parse_partition(fp::read_file(partition_path), instance);
      const auto result =
          fp::sim::run(instance.graph, instance.cluster, assignment, *policy, parse_weights(weights_text), seed);
      fs::create_directories(out);
      std::ostringstream trace;
      fp::write_trace(trace, result.trace, instance.graph, instance.cluster);
      fp::write_file((fs::path(out) / "trace.txt").string(), trace.str());
      fp::write_file((fs::path(out) / "report.json").string(), fp::dump_report(result.report, instance.cluster));
      fmt::print("makespan {}\nmean utilization {:.4f}\nmemory violations {}\n", result.report.makespan,
                 result.report.mean_utilization(), result.report.memory_violations.size());
      return 0;
    }

    if (*compare) {
      auto spec = fp::parse_experiment_spec(fp::read_file(spec_path));
      if (seed_base) spec.seed_base = *seed_base;
      if (weights_override) spec.msr_weights = parse_weights(*weights_override);
      if (!out.empty()) spec.output = out;
      if (device_override) {
        auto* generated = std::get_if<fp::GeneratorParams>(&spec.instance);
        if (!generated) throw fp::Error(fp::ErrorCode::parse_error, "--devices needs a generated instance");
        generated->devices = *device_override;
      }
      const auto table = fp::run_experiment(spec);
      fmt::print("{:<14} {:<6} {:>14} {:>12} {:>7}\n", "partitioner", "policy", "mean makespan", "stddev",
                 "failed");
      for (const auto& row : table.aggregates) {
        fmt::print("{:<14} {:<6} {:>14.4f} {:>12.4f} {:>7}\n", fp::to_string(row.partitioner),
                   fp::to_string(row.scheduler), row.mean_makespan, row.stddev_makespan, row.failed);
      }
      if (!spec.output.empty()) fmt::print("results in {}\n", spec.output);
      return 0;
    }

    if (*oracle) {
      const auto instance = fp::load_instance(instance_path);
      const auto groups = fp::build_groups(instance.graph);
      const auto best = fp::oracle::optimal(instance.graph, instance.cluster, groups);
      if (!out.empty()) fp::write_file(out, fp::dump_partition(best.partition, instance));
      fmt::print("optimal makespan {}\n", best.makespan);
      for (fp::DeviceId d = 0; d < best.device_order.size(); ++d) {
        if (best.device_order[d].empty()) continue;
        fmt::print("  {}:", instance.cluster.device(d).id);
        for (auto v : best.device_order[d]) fmt::print(" {}", instance.graph.vertex(v).id);
        fmt::print("\n");
      }
      return 0;
    }
  } catch (const fp::Error& e) {
    fmt::print(stderr, "error ({}): {}\n", fp::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
