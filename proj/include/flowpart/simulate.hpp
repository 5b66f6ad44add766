#pragma once

#include <cstdint>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"
#include "flowpart/sched.hpp"
#include "flowpart/trace.hpp"

namespace flowpart::sim {

struct MemoryViolation {
  DeviceId device = 0;
  double time = 0.0;  // first time the peak is reached
  double peak = 0.0;
  double capacity = 0.0;
};

struct SimReport {
  double makespan = 0.0;
  std::vector<double> utilization;  // busy time / makespan, per device
  std::vector<double> peak_memory;  // max active-edge volume, per device
  std::vector<MemoryViolation> memory_violations;
  std::size_t event_count = 0;

  double mean_utilization() const;
};

struct SimResult {
  ExecutionTrace trace;
  SimReport report;
};

/// Executes one iteration of the partitioned graph.
///
/// Events are vertex finishes and transfer completions, processed in time
/// order (transfers before finishes at equal times, then by id). Once all
/// events at a timestamp are applied, every free device with executable work
/// asks the policy for its next vertex, in ascending device order. A tensor
/// leaves its producer at the producer's finish and travels for
/// transfer_time(); links have no contention, and devices compute while
/// their tensors are in flight.
///
/// Memory breaches (active volume >= capacity) are reported, not fatal.
/// Throws Error(unreachable_link) for a tensor that cannot be delivered and
/// Error(internal) on deadlock, which a valid DAG with a total partition
/// cannot produce.
SimResult run(const DataflowGraph& graph, const DeviceCluster& cluster, const Partition& partition,
              Policy policy, const MsrWeights& weights = {}, std::uint64_t seed = 0);

SimReport report(const ExecutionTrace& trace, const DataflowGraph& graph, const DeviceCluster& cluster,
                 std::size_t event_count = 0);

}  // namespace flowpart::sim
