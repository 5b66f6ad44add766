#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/constraints.hpp"
#include "flowpart/graph.hpp"

namespace flowpart {

enum class Strategy { hash, batch_split, critical_path, mite, dfs, heft };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);
inline constexpr Strategy all_strategies[] = {Strategy::hash, Strategy::batch_split, Strategy::critical_path,
                                              Strategy::mite, Strategy::dfs,  Strategy::heft};

/// Added to every factor of the MITE and DFS products so that a zero factor
/// (empty device, no placed neighbours) does not erase the others.
inline constexpr double score_smoothing = 1e-3;

// Every strategy assigns whole collocation groups, honours device
// constraints and the static memory bound, and throws
// Error(infeasible_instance) when some group has no feasible device.
// All of them are pure functions of their arguments.

/// Random placement, each group drawn among its feasible devices with
/// probability proportional to device memory capacity.
Partition hash_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups, std::uint64_t seed);

/// Groups in descending total rank, each to the fastest feasible device.
Partition batch_split_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                                const CollocationGroups& groups);

/// Critical path on the fastest device that holds it (split into contiguous
/// segments over the next-fastest devices if none does); every other group
/// to the device with the least accumulated execution time after adding it.
Partition critical_path_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                                  const CollocationGroups& groups);

/// Memory, Importance, Traffic and Execution-time product, minimised.
Partition mite_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups);

/// Depth-first traversal by total rank, minimising traffic x execution time.
Partition dfs_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                        const CollocationGroups& groups);

/// HEFT processor selection restricted to feasible devices; the HEFT
/// schedule itself is discarded.
Partition heft_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups);

Partition make_partition(Strategy strategy, const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups, std::uint64_t seed = 0);

// Scoring pieces, exposed for inspection and tests.

struct MiteScore {
  double mem = 0.0;      // static memory utilisation after placement
  double imp = 0.0;      // 1 - normalised rank * normalised speed
  double traffic = 0.0;  // transfer time from already placed producers
  double exec = 0.0;     // execution time / worst among candidates
  double product = 0.0;  // smoothed product of the four
};

/// Sum over in-edges of the group from placed producers of transfer time to
/// `device`; zero for producers on `device` and for unplaced producers.
double traffic_score(GroupId group, DeviceId device, const PlacementState& state);

/// `group_rank` is the group's max member total rank, `max_rank` the
/// largest total rank in the graph, `candidates` the feasible devices.
MiteScore mite_score(GroupId group, DeviceId device, const PlacementState& state, double group_rank,
                     double max_rank, std::span<const DeviceId> candidates);

/// Visit order of the DFS strategy: sources by descending total rank,
/// successors by descending total rank, ties to the smaller id.
std::vector<VertexId> dfs_order(const DataflowGraph& graph, std::span<const double> total_rank);

/// Classic HEFT upward rank with mean execution and mean transfer costs.
std::vector<double> heft_rank(const DataflowGraph& graph, const DeviceCluster& cluster);

}  // namespace flowpart
