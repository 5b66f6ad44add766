#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/constraints.hpp"
#include "flowpart/graph.hpp"

namespace flowpart::oracle {

struct Limits {
  std::size_t max_vertices = 8;
  std::size_t max_devices = 3;
};

struct OptimalSolution {
  double makespan = 0.0;
  Partition partition;
  std::vector<std::vector<VertexId>> device_order;
  std::size_t num_vertices = 0;
  std::size_t num_devices = 0;
  std::size_t assignments_explored = 0;
  std::size_t schedules_explored = 0;
};

/// Makespan of the semi-active schedule that runs each device's vertices in
/// the given order, every vertex starting as soon as its device is free and
/// its tensors have arrived (same transfer model as the simulator). Returns
/// nullopt if the orders deadlock against each other.
std::optional<double> evaluate_orders(const DataflowGraph& graph, const DeviceCluster& cluster,
                                      std::span<const DeviceId> assignment,
                                      std::span<const std::vector<VertexId>> device_order);

/// Minimal makespan over every constraint-respecting group -> device
/// assignment (device constraints, collocation, static memory bound) and
/// every precedence-consistent execution order per device. Ties keep the
/// lexicographically smallest assignment.
///
/// Throws Error(instance_too_large) beyond `limits` and
/// Error(infeasible_instance) if no assignment is admissible.
OptimalSolution optimal(const DataflowGraph& graph, const DeviceCluster& cluster,
                        const CollocationGroups& groups, Limits limits = {});

/// True iff the optimal makespan is strictly below t_max.
bool decision(const DataflowGraph& graph, const DeviceCluster& cluster, const CollocationGroups& groups,
              double t_max, Limits limits = {});

}  // namespace flowpart::oracle
