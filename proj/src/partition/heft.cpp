#include <algorithm>
#include <queue>

#include "detail.hpp"

namespace flowpart {

std::vector<double> heft_rank(const DataflowGraph& graph, const DeviceCluster& cluster) {
  const auto k = cluster.size();
  double inverse_speed = 0.0;
  for (const auto& d : cluster.devices()) inverse_speed += 1.0 / d.speed;
  inverse_speed /= static_cast<double>(k);

  // Mean of 1/B over ordered pairs of distinct, connected devices.
  double inverse_bandwidth = 0.0;
  std::size_t links = 0;
  for (DeviceId i = 0; i < k; ++i) {
    for (DeviceId j = 0; j < k; ++j) {
      if (i == j || !(cluster.bandwidth(i, j) > 0.0)) continue;
      inverse_bandwidth += 1.0 / cluster.bandwidth(i, j);
      ++links;
    }
  }
  if (links > 0) inverse_bandwidth /= static_cast<double>(links);

  const auto& order = graph.topological_order();
  std::vector<double> rank(graph.num_vertices(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double tail = 0.0;
    for (EdgeId e : graph.out_edges(*it)) {
      const auto& edge = graph.edge(e);
      tail = std::max(tail, edge.volume * inverse_bandwidth + rank[edge.dst]);
    }
    rank[*it] = graph.vertex(*it).cost * inverse_speed + tail;
  }
  return rank;
}

namespace {

struct Slot {
  double start;
  double finish;
};

// Earliest start >= ready leaving room for `duration` between booked slots.
double earliest_gap(const std::vector<Slot>& slots, double ready, double duration) {
  double candidate = ready;
  for (const auto& slot : slots) {
    if (candidate + duration <= slot.start) break;
    candidate = std::max(candidate, slot.finish);
  }
  return candidate;
}

void book(std::vector<Slot>& slots, Slot slot) {
  auto at = std::upper_bound(slots.begin(), slots.end(), slot.start,
                             [](double t, const Slot& s) { return t < s.start; });
  slots.insert(at, slot);
}

}  // namespace

Partition heft_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups) {
  PlacementState state(graph, cluster, groups);
  const auto rank = heft_rank(graph, cluster);
  std::vector<std::vector<Slot>> timeline(cluster.size());
  std::vector<double> finish_time(graph.num_vertices(), 0.0);

  // Highest rank among vertices whose predecessors are all scheduled, so a
  // zero-cost chain with equal ranks still goes in dependency order.
  auto lower_priority = [&](VertexId a, VertexId b) { return rank[a] != rank[b] ? rank[a] < rank[b] : a > b; };
  std::priority_queue<VertexId, std::vector<VertexId>, decltype(lower_priority)> ready(lower_priority);
  std::vector<std::size_t> pending(graph.num_vertices());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    pending[v] = graph.in_edges(v).size();
    if (pending[v] == 0) ready.push(v);
  }

  while (!ready.empty()) {
    const VertexId v = ready.top();
    ready.pop();
    const GroupId g = groups.group_of(v);
    const bool pinned = state.device_of_group(g).has_value();
    const auto candidates = pinned ? std::vector<DeviceId>{*state.device_of_group(g)}
                                   : detail::require_feasible(g, state);

    DeviceId best = candidates.front();
    Slot best_slot{detail::infinity, detail::infinity};
    for (DeviceId d : candidates) {
      double data_ready = 0.0;
      for (EdgeId e : graph.in_edges(v)) {
        const auto& edge = graph.edge(e);
        const double arrival = finish_time[edge.src] +
                               detail::link_time(edge.volume, *state.device_of(edge.src), d, cluster);
        data_ready = std::max(data_ready, arrival);
      }
      const double duration = exec_time(graph.vertex(v), cluster.device(d));
      const double start = earliest_gap(timeline[d], data_ready, duration);
      if (start + duration < best_slot.finish) {
        best = d;
        best_slot = {start, start + duration};
      }
    }

    if (!pinned) state.assign(g, best);
    book(timeline[best], best_slot);
    finish_time[v] = best_slot.finish;

    for (EdgeId e : graph.out_edges(v)) {
      if (--pending[graph.edge(e).dst] == 0) ready.push(graph.edge(e).dst);
    }
  }
  return detail::finish(state, Strategy::heft);
}

}  // namespace flowpart
