#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"
#include "flowpart/trace.hpp"
#include "flowpart/violation.hpp"

namespace flowpart {

using GroupId = std::uint32_t;

/// Partition of V into collocation groups. Group ids follow the smallest
/// member vertex id, members are stored ascending, so the result does not
/// depend on the order in which pairs were supplied.
class CollocationGroups {
 public:
  std::size_t size() const { return members_.size(); }
  GroupId group_of(VertexId v) const { return group_of_[v]; }
  std::span<const VertexId> members(GroupId g) const { return members_[g]; }
  /// Common device constraint of all constrained members, if any.
  std::optional<DeviceId> constraint(GroupId g) const { return constraint_[g]; }

  bool operator==(const CollocationGroups&) const = default;

 private:
  friend CollocationGroups build_groups(std::size_t, std::span<const std::pair<VertexId, VertexId>>,
                                        std::span<const std::optional<DeviceId>>,
                                        const DataflowGraph*);

  std::vector<GroupId> group_of_;
  std::vector<std::vector<VertexId>> members_;
  std::vector<std::optional<DeviceId>> constraint_;
};

/// Groups vertices that share a colocation_group label. Throws
/// Error(contradictory_constraints) if a group pins two different devices.
CollocationGroups build_groups(const DataflowGraph& graph);

/// Transitive closure of an explicit pairwise relation (union-find).
/// `graph`, when given, only supplies names for error messages.
CollocationGroups build_groups(std::size_t num_vertices,
                               std::span<const std::pair<VertexId, VertexId>> pairs,
                               std::span<const std::optional<DeviceId>> device_constraints,
                               const DataflowGraph* graph = nullptr);

/// Sum of volumes of all edges whose destination is in `vertices`.
double static_footprint(std::span<const VertexId> vertices, const DataflowGraph& graph);

/// Greedy placement under construction: whole groups are assigned at once
/// and charged their static footprint against the device capacity.
class PlacementState {
 public:
  PlacementState(const DataflowGraph& graph, const DeviceCluster& cluster,
                 const CollocationGroups& groups);

  const DataflowGraph& graph() const { return *graph_; }
  const DeviceCluster& cluster() const { return *cluster_; }
  const CollocationGroups& groups() const { return *groups_; }

  std::optional<DeviceId> device_of_group(GroupId g) const { return group_device_[g]; }
  std::optional<DeviceId> device_of(VertexId v) const {
    return group_device_[groups_->group_of(v)];
  }
  double used_memory(DeviceId d) const { return used_[d]; }
  double spare_memory(DeviceId d) const { return cluster_->device(d).memory - used_[d]; }
  /// Summed execution time of everything assigned to d so far.
  double load(DeviceId d) const { return load_[d]; }

  double footprint(GroupId g) const { return footprint_[g]; }
  double cost(GroupId g) const { return cost_[g]; }

  void assign(GroupId g, DeviceId d);
  bool complete() const;
  /// Throws Error(internal) unless every group is assigned.
  Partition to_partition(std::string strategy, std::optional<std::uint64_t> seed = {}) const;

 private:
  const DataflowGraph* graph_;
  const DeviceCluster* cluster_;
  const CollocationGroups* groups_;
  std::vector<std::optional<DeviceId>> group_device_;
  std::vector<double> used_;
  std::vector<double> load_;
  std::vector<double> footprint_;
  std::vector<double> cost_;
};

/// Devices a group may still go to, ascending id: the pinned device if the
/// group is placed, else devices allowed by its constraint with spare static
/// memory >= its footprint. Empty means the group is infeasible.
std::vector<DeviceId> feasible_devices(GroupId group, const CollocationGroups& groups,
                                       const DeviceCluster& cluster, const PlacementState& state);

/// Static checks on a partition: totality, known devices, collocation,
/// device constraints and the per-device bound sum(in-edge volumes) <= C.
ViolationList check_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                              const CollocationGroups& groups, const Partition& partition);

/// Polynomial-time certificate check of a partition plus execution trace:
/// collocation, device constraints, exact memory bound (active volume < C at
/// every event time), precedence through transfers, execution durations,
/// per-device exclusivity, and exactly-once execution.
ViolationList validate_solution(const DataflowGraph& graph, const DeviceCluster& cluster,
                                const Partition& partition, const ExecutionTrace& trace);

}  // namespace flowpart
