#include "flowpart/sched.hpp"

#include <algorithm>

#include "flowpart/error.hpp"

namespace flowpart {

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::fifo: return "fifo";
    case Policy::pct: return "pct";
    case Policy::msr: return "msr";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view name) {
  for (Policy p : all_policies) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

PctTable compute_pct(const DataflowGraph& graph, const DeviceCluster& cluster, const Partition& partition) {
  const auto& order = graph.topological_order();
  PctTable pct(graph.num_vertices(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    const DeviceId here = partition.device_of(v);
    double longest = 0.0;
    for (EdgeId e : graph.out_edges(v)) {
      const auto& edge = graph.edge(e);
      const double path = pct[edge.dst] + transfer_time(edge, here, partition.device_of(edge.dst), cluster);
      longest = std::max(longest, path);
    }
    pct[v] = longest + exec_time(graph.vertex(v), cluster.device(here));
  }
  return pct;
}

double msr_score(VertexId vertex, const DataflowGraph& graph, const Partition& partition,
                 std::span<const bool> idle, const MsrWeights& weights) {
  double score = 0.0;
  const DeviceId here = partition.device_of(vertex);
  for (EdgeId e : graph.out_edges(vertex)) {
    const VertexId succ = graph.edge(e).dst;
    const DeviceId there = partition.device_of(succ);
    const bool only_pred = graph.in_edges(succ).size() == 1;
    score += weights.alpha;
    if (there != here) score += weights.beta;
    if (only_pred) score += weights.gamma;
    if (only_pred && idle[there]) score += weights.delta;
  }
  return score;
}

SchedulerState::SchedulerState(Policy policy, std::size_t num_devices, MsrWeights weights, std::uint64_t seed)
    : policy_(policy), weights_(weights), rng_(seed), queues_(num_devices) {}

std::optional<VertexId> pick_next(DeviceId device, SchedulerState& state, const PickContext& context) {
  auto& queue = state.queues_[device];
  if (queue.empty()) return std::nullopt;

  std::size_t chosen = 0;
  switch (state.policy_) {
    case Policy::fifo: {
      double earliest = queue.front().ready_time;
      for (const auto& entry : queue) earliest = std::min(earliest, entry.ready_time);
      std::vector<std::size_t> tied;
      for (std::size_t i = 0; i < queue.size(); ++i) {
        if (queue[i].ready_time == earliest) tied.push_back(i);
      }
      std::sort(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) { return queue[a].vertex < queue[b].vertex; });
      chosen = tied.size() == 1 ? tied.front() : tied[uniform_index(state.rng_, tied.size())];
      break;
    }
    case Policy::pct:
    case Policy::msr: {
      if (state.policy_ == Policy::pct && !context.pct) throw Error(ErrorCode::internal, "PCT policy without a PCT table");
      auto score = [&](VertexId v) {
        return state.policy_ == Policy::pct
                   ? (*context.pct)[v]
                   : msr_score(v, context.graph, context.partition, context.idle, state.weights_);
      };
      double best = score(queue[0].vertex);
      for (std::size_t i = 1; i < queue.size(); ++i) {
        const double s = score(queue[i].vertex);
        if (s > best || (s == best && queue[i].vertex < queue[chosen].vertex)) {
          best = s;
          chosen = i;
        }
      }
      break;
    }
  }

  const VertexId picked = queue[chosen].vertex;
  queue[chosen] = queue.back();
  queue.pop_back();
  return picked;
}

}  // namespace flowpart
