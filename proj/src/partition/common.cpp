#include <algorithm>
#include <numeric>

#include <fmt/core.h>

#include "detail.hpp"
#include "flowpart/error.hpp"

namespace flowpart {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::hash: return "hash";
    case Strategy::batch_split: return "batch_split";
    case Strategy::critical_path: return "critical_path";
    case Strategy::mite: return "mite";
    case Strategy::dfs: return "dfs";
    case Strategy::heft: return "heft";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

Partition make_partition(Strategy strategy, const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups, std::uint64_t seed) {
  switch (strategy) {
    case Strategy::hash: return hash_partition(graph, cluster, groups, seed);
    case Strategy::batch_split: return batch_split_partition(graph, cluster, groups);
    case Strategy::critical_path: return critical_path_partition(graph, cluster, groups);
    case Strategy::mite: return mite_partition(graph, cluster, groups);
    case Strategy::dfs: return dfs_partition(graph, cluster, groups);
    case Strategy::heft: return heft_partition(graph, cluster, groups);
  }
  throw Error(ErrorCode::internal, "unknown strategy");
}

namespace detail {

std::vector<DeviceId> require_feasible(GroupId group, const PlacementState& state) {
  auto devices = feasible_devices(group, state.groups(), state.cluster(), state);
  if (devices.empty()) {
    const VertexId first = state.groups().members(group).front();
    throw Error(ErrorCode::infeasible_instance,
                fmt::format("infeasible instance: no feasible device for the group of '{}'",
                            state.graph().vertex(first).id));
  }
  return devices;
}

std::vector<double> group_ranks(const CollocationGroups& groups, std::span<const double> total_rank) {
  std::vector<double> ranks(groups.size(), 0.0);
  for (GroupId g = 0; g < groups.size(); ++g) {
    for (VertexId v : groups.members(g)) ranks[g] = std::max(ranks[g], total_rank[v]);
  }
  return ranks;
}

std::vector<GroupId> by_descending_rank(std::span<const double> ranks) {
  std::vector<GroupId> order(ranks.size());
  std::iota(order.begin(), order.end(), GroupId{0});
  std::stable_sort(order.begin(), order.end(), [&](GroupId a, GroupId b) { return ranks[a] > ranks[b]; });
  return order;
}

Partition finish(const PlacementState& state, Strategy strategy, std::optional<std::uint64_t> seed) {
  auto partition = state.to_partition(std::string(to_string(strategy)), seed);
  const auto violations = check_partition(state.graph(), state.cluster(), state.groups(), partition);
  if (!violations.empty()) {
    throw Error(ErrorCode::internal,
                fmt::format("{} produced an invalid partition: {}", to_string(strategy), violations.front().message));
  }
  return partition;
}

double link_time(double volume, DeviceId from, DeviceId to, const DeviceCluster& cluster) {
  if (from == to || volume == 0.0) return 0.0;
  const double b = cluster.bandwidth(from, to);
  return b > 0.0 ? volume / b : infinity;
}

}  // namespace detail
}  // namespace flowpart
