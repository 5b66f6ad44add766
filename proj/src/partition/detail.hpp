#pragma once

#include <limits>
#include <string>
#include <vector>

#include "flowpart/constraints.hpp"
#include "flowpart/partition.hpp"

namespace flowpart::detail {

/// feasible_devices() that throws Error(infeasible_instance) when empty.
std::vector<DeviceId> require_feasible(GroupId group, const PlacementState& state);

/// Max member total rank per group.
std::vector<double> group_ranks(const CollocationGroups& groups, std::span<const double> total_rank);

/// Group ids by descending rank, ties to the smaller group id.
std::vector<GroupId> by_descending_rank(std::span<const double> ranks);

/// Converts the finished placement and re-checks the static constraints.
Partition finish(const PlacementState& state, Strategy strategy, std::optional<std::uint64_t> seed = {});

/// transfer_time() with unreachable links mapped to +inf.
double link_time(double volume, DeviceId from, DeviceId to, const DeviceCluster& cluster);

inline constexpr double infinity = std::numeric_limits<double>::infinity();

}  // namespace flowpart::detail
