#include <algorithm>

#include "detail.hpp"

namespace flowpart {

namespace {

// `devices` is ascending by id; the fastest wins, ties to the smaller id.
DeviceId fastest(std::span<const DeviceId> devices, const DeviceCluster& cluster) {
  DeviceId best = devices.front();
  for (DeviceId d : devices) {
    if (cluster.device(d).speed > cluster.device(best).speed) best = d;
  }
  return best;
}

}  // namespace

Partition batch_split_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                                const CollocationGroups& groups) {
  PlacementState state(graph, cluster, groups);
  const auto ranks = detail::group_ranks(groups, total_rank(graph).total);
  for (GroupId g : detail::by_descending_rank(ranks)) {
    state.assign(g, fastest(detail::require_feasible(g, state), cluster));
  }
  return detail::finish(state, Strategy::batch_split);
}

Partition critical_path_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                                  const CollocationGroups& groups) {
  PlacementState state(graph, cluster, groups);
  if (graph.empty()) return detail::finish(state, Strategy::critical_path);

  std::vector<GroupId> path_groups;
  for (VertexId v : critical_path(graph)) {
    const GroupId g = groups.group_of(v);
    if (std::find(path_groups.begin(), path_groups.end(), g) == path_groups.end()) path_groups.push_back(g);
  }

  // Pinned path groups have exactly one admissible device.
  std::vector<GroupId> movable;
  for (GroupId g : path_groups) {
    if (groups.constraint(g)) {
      state.assign(g, detail::require_feasible(g, state).front());
    } else {
      movable.push_back(g);
    }
  }

  double needed = 0.0;
  for (GroupId g : movable) needed += state.footprint(g);
  const auto speed_order = cluster.by_speed();
  auto whole = std::find_if(speed_order.begin(), speed_order.end(),
                            [&](DeviceId d) { return state.spare_memory(d) >= needed; });
  if (whole != speed_order.end()) {
    for (GroupId g : movable) state.assign(g, *whole);
  } else {
    // Contiguous segments, filling devices in descending speed.
    std::size_t cursor = 0;
    for (GroupId g : movable) {
      while (cursor < speed_order.size() && state.spare_memory(speed_order[cursor]) < state.footprint(g)) ++cursor;
      if (cursor < speed_order.size()) {
        state.assign(g, speed_order[cursor]);
      } else {
        state.assign(g, fastest(detail::require_feasible(g, state), cluster));
      }
    }
  }

  const auto ranks = detail::group_ranks(groups, total_rank(graph).total);
  for (GroupId g : detail::by_descending_rank(ranks)) {
    if (state.device_of_group(g)) continue;
    const auto devices = detail::require_feasible(g, state);
    DeviceId best = devices.front();
    double best_load = detail::infinity;
    for (DeviceId d : devices) {
      const double load = state.load(d) + exec_time(state.cost(g), cluster.device(d));
      if (load < best_load) {
        best_load = load;
        best = d;
      }
    }
    state.assign(g, best);
  }
  return detail::finish(state, Strategy::critical_path);
}

}  // namespace flowpart
