#include <algorithm>
#include <numeric>

#include "detail.hpp"

namespace flowpart {

double traffic_score(GroupId group, DeviceId device, const PlacementState& state) {
  const auto& graph = state.graph();
  double traffic = 0.0;
  for (VertexId v : state.groups().members(group)) {
    for (EdgeId e : graph.in_edges(v)) {
      const auto& edge = graph.edge(e);
      if (auto from = state.device_of(edge.src)) traffic += detail::link_time(edge.volume, *from, device, state.cluster());
    }
  }
  return traffic;
}

namespace {

double normalized_exec(GroupId group, DeviceId device, const PlacementState& state,
                       std::span<const DeviceId> candidates) {
  const auto& cluster = state.cluster();
  double worst = 0.0;
  for (DeviceId d : candidates) worst = std::max(worst, exec_time(state.cost(group), cluster.device(d)));
  return worst > 0.0 ? exec_time(state.cost(group), cluster.device(device)) / worst : 1.0;
}

double smoothed(double factor) { return score_smoothing + factor; }

}  // namespace

MiteScore mite_score(GroupId group, DeviceId device, const PlacementState& state, double group_rank,
                     double max_rank, std::span<const DeviceId> candidates) {
  const auto& cluster = state.cluster();
  MiteScore s;
  s.mem = (state.used_memory(device) + state.footprint(group)) / cluster.device(device).memory;
  const double rank_share = max_rank > 0.0 ? group_rank / max_rank : 0.0;
  s.imp = 1.0 - rank_share * (cluster.device(device).speed / cluster.max_speed());
  s.traffic = traffic_score(group, device, state);
  s.exec = normalized_exec(group, device, state, candidates);
  s.product = smoothed(s.mem) * smoothed(s.imp) * smoothed(s.traffic) * smoothed(s.exec);
  return s;
}

Partition mite_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups) {
  PlacementState state(graph, cluster, groups);
  const auto total = total_rank(graph).total;
  const double max_rank = total.empty() ? 0.0 : *std::max_element(total.begin(), total.end());
  const auto ranks = detail::group_ranks(groups, total);

  for (GroupId g : detail::by_descending_rank(ranks)) {
    const auto devices = detail::require_feasible(g, state);
    DeviceId best = devices.front();
    double best_score = detail::infinity;
    for (DeviceId d : devices) {
      const double score = mite_score(g, d, state, ranks[g], max_rank, devices).product;
      if (score < best_score) {
        best_score = score;
        best = d;
      }
    }
    state.assign(g, best);
  }
  return detail::finish(state, Strategy::mite);
}

std::vector<VertexId> dfs_order(const DataflowGraph& graph, std::span<const double> total_rank) {
  auto higher = [&](VertexId a, VertexId b) {
    return total_rank[a] != total_rank[b] ? total_rank[a] > total_rank[b] : a < b;
  };

  std::vector<VertexId> sources;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (graph.is_source(v)) sources.push_back(v);
  }
  std::sort(sources.begin(), sources.end(), higher);

  std::vector<std::vector<VertexId>> children(graph.num_vertices());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    for (EdgeId e : graph.out_edges(v)) children[v].push_back(graph.edge(e).dst);
    std::sort(children[v].begin(), children[v].end(), higher);
  }

  std::vector<VertexId> order;
  order.reserve(graph.num_vertices());
  std::vector<bool> visited(graph.num_vertices(), false);
  std::vector<std::pair<VertexId, std::size_t>> stack;
  for (VertexId root : sources) {
    if (visited[root]) continue;
    visited[root] = true;
    order.push_back(root);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == children[v].size()) {
        stack.pop_back();
        continue;
      }
      const VertexId child = children[v][next++];
      if (visited[child]) continue;
      visited[child] = true;
      order.push_back(child);
      stack.emplace_back(child, 0);
    }
  }
  return order;
}

Partition dfs_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                        const CollocationGroups& groups) {
  PlacementState state(graph, cluster, groups);
  const auto total = total_rank(graph).total;
  for (VertexId v : dfs_order(graph, total)) {
    const GroupId g = groups.group_of(v);
    if (state.device_of_group(g)) continue;
    const auto devices = detail::require_feasible(g, state);
    DeviceId best = devices.front();
    double best_score = detail::infinity;
    for (DeviceId d : devices) {
      const double score = smoothed(traffic_score(g, d, state)) * smoothed(normalized_exec(g, d, state, devices));
      if (score < best_score) {
        best_score = score;
        best = d;
      }
    }
    state.assign(g, best);
  }
  return detail::finish(state, Strategy::dfs);
}

}  // namespace flowpart
