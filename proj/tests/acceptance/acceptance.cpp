// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. An optional argument names a directory that receives the
// criterion-1 CSVs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "flowpart/constraints.hpp"
#include "flowpart/error.hpp"
#include "flowpart/oracle.hpp"
#include "flowpart/partition.hpp"
#include "flowpart/sched.hpp"
#include "flowpart/workbench/experiment.hpp"
#include "flowpart/workbench/generator.hpp"
#include "support/fixtures.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace flowpart;

namespace {

constexpr std::size_t speedup_instances = 10;
constexpr std::size_t speedup_repetitions = 10;
constexpr std::size_t speedup_wins_required = 9;
constexpr double speedup_median_required = 1.5;

constexpr std::size_t dominance_instances = 200;
constexpr double dominance_tolerance = 1e-9;
constexpr double attainment_required = 0.30;

constexpr std::size_t rank_instances = 500;
constexpr std::size_t pct_instances = 100;

constexpr std::size_t hash_draws = 10000;
constexpr double chi_square_critical_df4 = 13.2767;  // p = 0.01

constexpr double static_bound_tolerance = 1e-9;
// Makespans and the bound are summed in different orders.
constexpr double lower_bound_tolerance = 1e-12;

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("{} criterion {} ({}): {}\n", ok ? "PASS" : "FAIL", id, name, detail);
  std::fflush(stdout);
}

// Tallies for criteria 5 and 8, fed by every simulated run of criteria 1-2.
struct RunAudit {
  std::size_t runs = 0;
  std::size_t structural = 0;        // collocation, device, precedence, exclusivity, ...
  std::size_t breaches = 0;          // simulator-reported memory breaches
  std::size_t unexplained = 0;       // breach not at a static-bound-exempt peak
  std::size_t disagreements = 0;     // simulator and certificate disagree on memory
  std::size_t below_bound = 0;
  std::string first_problem;

  void note(const std::string& what) {
    if (first_problem.empty()) first_problem = what;
  }

  void check(const Instance& inst, const Partition& p, const sim::SimResult& r, const std::string& label) {
    const auto& g = inst.graph;
    const auto& c = inst.cluster;
    ++runs;
    const auto violations = validate_solution(g, c, p, r.trace);
    std::size_t certificate_breaches = 0;
    for (const auto& v : violations) {
      // The certificate reports static-bound and active-volume breaches as
      // memory; only the latter may appear.
      if (v.kind == ViolationKind::memory && v.message.rfind("active volume", 0) == 0) {
        ++certificate_breaches;
      } else {
        ++structural;
        note(fmt::format("{}: {}", label, v.message));
      }
    }

    std::vector<std::vector<VertexId>> on(c.size());
    for (VertexId v = 0; v < g.num_vertices(); ++v) on[p.assignment[v]].push_back(v);
    for (const auto& m : r.report.memory_violations) {
      ++breaches;
      const double footprint = static_footprint(on[m.device], g);
      // Strict check fails while the static bound holds: the peak sits
      // exactly at capacity.
      const bool exempt = m.peak >= m.capacity && m.peak <= footprint &&
                          footprint <= m.capacity * (1 + static_bound_tolerance);
      if (!exempt) {
        ++unexplained;
        note(fmt::format("{}: breach on d{} peak {} capacity {} footprint {}", label, m.device, m.peak, m.capacity,
                         footprint));
      }
    }
    if (certificate_breaches != r.report.memory_violations.size()) {
      ++disagreements;
      note(label + ": simulator and certificate disagree on memory breaches");
    }

    const double bound = path_cost(g, critical_path(g)) / c.max_speed();
    if (r.report.makespan < bound * (1 - lower_bound_tolerance)) {
      ++below_bound;
      note(fmt::format("{}: makespan {} below bound {}", label, r.report.makespan, bound));
    }
  }
};

RunAudit audit;
std::vector<std::string> determinism_problems;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

GeneratorParams speedup_params(std::size_t i) {
  GeneratorParams params;
  params.vertices = 350 + i * 4650 / (speedup_instances - 1);
  params.avg_degree = 1.5 + 0.3 * static_cast<double>(i) / (speedup_instances - 1);
  params.devices = 50;
  params.seed = i + 1;
  return params;
}

ExperimentSpec full_matrix(std::size_t repetitions) {
  ExperimentSpec spec;
  spec.repetitions = repetitions;
  return spec;
}

void print_matrix(const ResultTable& table) {
  fmt::print("    {:>16}", "");
  for (Policy s : all_policies) fmt::print(" {:>12}", to_string(s));
  fmt::print("\n");
  for (Strategy p : all_strategies) {
    fmt::print("    {:>16}", to_string(p));
    for (Policy s : all_policies) {
      const auto* cell = table.find(p, s);
      fmt::print(" {:>12.1f}", cell ? cell->mean_makespan : std::nan(""));
    }
    fmt::print("\n");
  }
}

void criterion_speedup(const std::string& csv_dir) {
  std::size_t wins = 0;
  std::vector<double> ratios;
  // Log-mean speedup of every cell over hash+fifo, across instances.
  std::vector<double> log_speedup(std::size(all_strategies) * std::size(all_policies), 0.0);

  for (std::size_t i = 0; i < speedup_instances; ++i) {
    const auto params = speedup_params(i);
    const Instance inst = generate_instance(params);
    const auto spec = full_matrix(speedup_repetitions);
    const auto label = fmt::format("speedup instance {}", i);
    const auto table = run_experiment(inst, spec, [&](const RunRecord& rec) {
      audit.check(inst, rec.partition, rec.result,
                  fmt::format("{} {}+{} rep {}", label, to_string(rec.row.partitioner), to_string(rec.row.scheduler),
                              rec.row.repetition));
    });

    const double baseline = table.find(Strategy::hash, Policy::fifo)->mean_makespan;
    const double ours = table.find(Strategy::critical_path, Policy::pct)->mean_makespan;
    const double ratio = baseline / ours;
    ratios.push_back(ratio);
    if (ours < baseline) ++wins;
    fmt::print("  instance {}: {} vertices, {} edges, hash+fifo {:.1f}, critical_path+pct {:.1f}, speedup {:.2f}x\n",
               i, inst.graph.num_vertices(), inst.graph.num_edges(), baseline, ours, ratio);
    print_matrix(table);

    std::size_t cell = 0;
    for (Strategy p : all_strategies) {
      for (Policy s : all_policies) log_speedup[cell++] += std::log(baseline / table.find(p, s)->mean_makespan);
    }

    if (!csv_dir.empty()) write_results(table, (std::filesystem::path(csv_dir) / fmt::format("instance{}", i)).string());

    // Criterion 6 on the two smallest instances: rerun, serially and with
    // a thread pool, and compare bytes.
    if (i < 2) {
      const auto raw = raw_csv(table), summary = summary_csv(table);
      for (std::size_t threads : {std::size_t{1}, std::size_t{4}}) {
        auto again_spec = spec;
        again_spec.threads = threads;
        const auto again = run_experiment(generate_instance(params), again_spec);
        if (raw_csv(again) != raw || summary_csv(again) != summary) {
          determinism_problems.push_back(fmt::format("{} with {} threads", label, threads));
        }
      }
    }
  }

  fmt::print("  geometric-mean speedup over hash+fifo across instances:\n");
  fmt::print("    {:>16}", "");
  for (Policy s : all_policies) fmt::print(" {:>12}", to_string(s));
  fmt::print("\n");
  std::size_t cell = 0;
  for (Strategy p : all_strategies) {
    fmt::print("    {:>16}", to_string(p));
    for (std::size_t k = 0; k < std::size(all_policies); ++k) {
      fmt::print(" {:>11.2f}x", std::exp(log_speedup[cell++] / speedup_instances));
    }
    fmt::print("\n");
  }

  const double med = median(ratios);
  verdict(1, "directional speedup", wins >= speedup_wins_required && med >= speedup_median_required,
          fmt::format("critical_path+pct beats hash+fifo on {}/{} instances (need {}), median speedup {:.3f}x (need "
                      "{}x)",
                      wins, speedup_instances, speedup_wins_required, med, speedup_median_required));
}

void criterion_dominance() {
  std::mt19937_64 rng(20240601);
  std::size_t instances = 0, skipped = 0, below = 0;
  const std::size_t cells = std::size(all_strategies) * std::size(all_policies);
  std::vector<std::size_t> attained(cells, 0);
  std::string first_below;

  while (instances < dominance_instances) {
    const auto inst = fixtures::random_instance(rng, {.max_vertices = 7, .max_devices = 3});
    double optimum = 0.0;
    try {
      optimum = oracle::optimal(inst.graph, inst.cluster, build_groups(inst.graph)).makespan;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::infeasible_instance) throw;
      ++skipped;
      continue;
    }
    ExperimentSpec spec = full_matrix(1);
    spec.seed_base = instances;
    const auto label = fmt::format("dominance instance {}", instances);
    const auto table = run_experiment(inst, spec, [&](const RunRecord& rec) {
      audit.check(inst, rec.partition, rec.result,
                  fmt::format("{} {}+{}", label, to_string(rec.row.partitioner), to_string(rec.row.scheduler)));
    });
    for (std::size_t k = 0; k < cells; ++k) {
      const auto& row = table.rows[k];
      if (!row.ok) continue;
      if (row.makespan < optimum * (1 - dominance_tolerance)) {
        ++below;
        if (first_below.empty()) {
          first_below = fmt::format("{} {}+{}: {} < optimum {}", label, to_string(row.partitioner),
                                    to_string(row.scheduler), row.makespan, optimum);
        }
      }
      if (std::abs(row.makespan - optimum) <= dominance_tolerance * optimum) ++attained[k];
    }
    ++instances;
  }

  const auto best = std::max_element(attained.begin(), attained.end()) - attained.begin();
  const double share = static_cast<double>(attained[best]) / dominance_instances;
  const auto& best_row = std::pair{all_strategies[best / std::size(all_policies)],
                                   all_policies[best % std::size(all_policies)]};
  std::string detail = fmt::format(
      "{} instances ({} infeasible skipped), {} runs below the optimum; best combination {}+{} optimal on {:.1f}% "
      "(need {:.0f}%)",
      instances, skipped, below, to_string(best_row.first), to_string(best_row.second), 100 * share,
      100 * attainment_required);
  if (!first_below.empty()) detail += "; first: " + first_below;
  verdict(2, "oracle dominance", below == 0 && share >= attainment_required, detail);
}

bool is_source_to_sink_path(const DataflowGraph& g, const std::vector<VertexId>& path) {
  if (path.empty()) return g.num_vertices() == 0;
  if (!oracles::predecessors(g, path.front()).empty() || !oracles::successors(g, path.back()).empty()) return false;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto next = oracles::successors(g, path[i - 1]);
    if (std::find(next.begin(), next.end(), path[i]) == next.end()) return false;
  }
  return true;
}

void criterion_ranks() {
  std::mt19937_64 rng(8128);
  std::size_t mismatches = 0;
  std::string first;
  for (std::size_t trial = 0; trial < rank_instances; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const double p = std::uniform_real_distribution<double>(0.1, 0.7)(rng);
    const auto g = fixtures::random_dag(rng, n, p, 10, 5);
    const auto up = up_rank(g), down = down_rank(g);
    const auto total = total_rank(g);
    const auto up_ref = oracles::up_by_paths(g), down_ref = oracles::down_by_paths(g);
    bool ok = up == up_ref && down == down_ref;
    for (VertexId v = 0; v < n; ++v) ok = ok && total.total[v] == up_ref[v] + down_ref[v];
    const auto path = critical_path(g);
    ok = ok && is_source_to_sink_path(g, path) && path_cost(g, path) == oracles::longest_path_cost(g);
    if (!ok) {
      ++mismatches;
      if (first.empty()) first = fmt::format("; first mismatch on DAG {} ({} vertices)", trial, n);
    }
  }
  verdict(3, "ranks and critical path", mismatches == 0,
          fmt::format("{} DAGs, {} mismatches against path enumeration{}", rank_instances, mismatches, first));
}

void criterion_pct() {
  std::mt19937_64 rng(4242);
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t trial = 0; trial < pct_instances; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const auto g = fixtures::random_dag(rng, n, 0.35, 10, 10);
    const auto k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<double> speeds(k), memory(k, 1e9);
    for (auto& s : speeds) s = fixtures::quarter(rng, 1, 4);
    auto c = fixtures::cluster_of(speeds, memory);
    std::vector<double> bandwidth(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i != j) bandwidth[i * k + j] = fixtures::quarter(rng, 1, 8);
      }
    }
    c = DeviceCluster({c.devices().begin(), c.devices().end()}, bandwidth);
    std::vector<DeviceId> a(n);
    for (auto& d : a) d = static_cast<DeviceId>(rng() % k);
    const auto p = fixtures::partition_of(a);
    const auto pct = compute_pct(g, c, p);
    for (VertexId v = 0; v < n; ++v, ++compared) {
      if (pct[v] != oracles::pct_of(g, c, p, v)) ++mismatches;
    }
  }
  verdict(4, "pct recursion", mismatches == 0,
          fmt::format("{} instances, {} vertices compared, {} inexact", pct_instances, compared, mismatches));
}

void criterion_soundness() {
  const bool ok = audit.structural == 0 && audit.unexplained == 0 && audit.disagreements == 0;
  std::string detail = fmt::format(
      "{} runs audited, {} structural violations, {} memory breaches ({} not at a static-bound-exempt peak, {} "
      "simulator/certificate disagreements)",
      audit.runs, audit.structural, audit.breaches, audit.unexplained, audit.disagreements);
  if (!ok) detail += "; first: " + audit.first_problem;
  verdict(5, "constraint soundness", ok, detail);
}

void criterion_determinism() {
  // Small instance, full matrix, every scheduler and several repetitions.
  GeneratorParams params;
  params.vertices = 200;
  params.devices = 12;
  params.device_constraint_fraction = 0.1;
  params.seed = 99;
  auto spec = full_matrix(5);
  spec.instance = params;
  spec.seed_base = 31;
  const auto first = run_experiment(spec);
  for (std::size_t threads : {std::size_t{1}, std::size_t{3}}) {
    spec.threads = threads;
    const auto again = run_experiment(spec);
    if (raw_csv(again) != raw_csv(first) || summary_csv(again) != summary_csv(first)) {
      determinism_problems.push_back(fmt::format("200-vertex matrix with {} threads", threads));
    }
  }
  std::string detail = "criterion-1 instances 0-1 and a 200-vertex matrix rerun serially and threaded";
  if (!determinism_problems.empty()) detail += "; differing: " + determinism_problems.front();
  verdict(6, "determinism", determinism_problems.empty(), detail);
}

void criterion_hash() {
  const std::vector<double> capacity{100, 200, 300, 400, 500};
  const auto g = fixtures::graph_of(std::vector<double>(hash_draws, 1.0), {});
  const auto c = fixtures::cluster_of(std::vector<double>(capacity.size(), 1.0), capacity);
  const auto p = hash_partition(g, c, build_groups(g), 1);
  std::vector<double> observed(capacity.size(), 0.0);
  for (DeviceId d : p.assignment) observed[d] += 1;
  double total = 0.0;
  for (double x : capacity) total += x;
  double chi = 0.0;
  for (std::size_t d = 0; d < capacity.size(); ++d) {
    const double expected = hash_draws * capacity[d] / total;
    chi += (observed[d] - expected) * (observed[d] - expected) / expected;
  }
  verdict(7, "hash proportionality", chi < chi_square_critical_df4,
          fmt::format("{} draws over capacities 100..500, chi-square {:.3f} (critical {} at p=0.01, df 4)", hash_draws,
                      chi, chi_square_critical_df4));
}

void criterion_lower_bound() {
  verdict(8, "lower bound", audit.below_bound == 0 && audit.runs > 0,
          fmt::format("{} runs, {} below critical-path cost / max speed", audit.runs, audit.below_bound));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string csv_dir = argc > 1 ? argv[1] : "";
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    criterion_speedup(csv_dir);
    fmt::print("  ({:.1f}s)\n", elapsed());
    criterion_dominance();
    criterion_ranks();
    criterion_pct();
    criterion_soundness();
    criterion_determinism();
    criterion_hash();
    criterion_lower_bound();
  } catch (const std::exception& e) {
    fmt::print("FAIL acceptance suite aborted: {}\n", e.what());
    return 1;
  }
  fmt::print("{} of 8 criteria passed in {:.1f}s\n", 8 - failures, elapsed());
  return failures == 0 ? 0 : 1;
}
