#include "flowpart/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <fmt/core.h>

#include "flowpart/error.hpp"

namespace flowpart::oracle {

namespace {

using Mask = std::uint32_t;

double transfer_or_inf(const EdgeRecord& edge, DeviceId from, DeviceId to, const DeviceCluster& cluster) {
  if (from == to || edge.volume == 0.0) return 0.0;
  const double b = cluster.bandwidth(from, to);
  return b > 0.0 ? edge.volume / b : INFINITY;
}

// All orders of `members` in which u precedes v whenever u reaches v.
void linear_extensions(std::span<const VertexId> members, std::span<const Mask> reaches,
                       std::vector<VertexId>& prefix, Mask placed, std::vector<std::vector<VertexId>>& out) {
  if (prefix.size() == members.size()) {
    out.push_back(prefix);
    return;
  }
  for (VertexId v : members) {
    if (placed & (Mask{1} << v)) continue;
    bool blocked = false;
    for (VertexId u : members) {
      if (u != v && !(placed & (Mask{1} << u)) && (reaches[u] & (Mask{1} << v))) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    prefix.push_back(v);
    linear_extensions(members, reaches, prefix, placed | (Mask{1} << v), out);
    prefix.pop_back();
  }
}

bool within(double used, double capacity) { return used <= capacity + 1e-9 * std::max(1.0, std::abs(capacity)); }

}  // namespace

std::optional<double> evaluate_orders(const DataflowGraph& graph, const DeviceCluster& cluster,
                                      std::span<const DeviceId> assignment,
                                      std::span<const std::vector<VertexId>> device_order) {
  const auto n = graph.num_vertices();
  std::vector<double> finish(n, 0.0);
  std::vector<bool> done(n, false);
  std::vector<std::size_t> next(device_order.size(), 0);
  std::vector<double> device_free(device_order.size(), 0.0);
  std::size_t completed = 0;
  double makespan = 0.0;

  bool progress = true;
  while (progress) {
    progress = false;
    for (DeviceId d = 0; d < device_order.size(); ++d) {
      while (next[d] < device_order[d].size()) {
        const VertexId v = device_order[d][next[d]];
        double start = device_free[d];
        bool runnable = true;
        for (EdgeId e : graph.in_edges(v)) {
          const auto& edge = graph.edge(e);
          if (!done[edge.src]) {
            runnable = false;
            break;
          }
          start = std::max(start, finish[edge.src] + transfer_or_inf(edge, assignment[edge.src], d, cluster));
        }
        if (!runnable) break;
        finish[v] = start + exec_time(graph.vertex(v), cluster.device(d));
        device_free[d] = finish[v];
        makespan = std::max(makespan, finish[v]);
        done[v] = true;
        ++completed;
        ++next[d];
        progress = true;
      }
    }
  }
  if (completed != n) return std::nullopt;
  return makespan;
}

OptimalSolution optimal(const DataflowGraph& graph, const DeviceCluster& cluster, const CollocationGroups& groups,
                        Limits limits) {
  const auto n = graph.num_vertices();
  const auto k = cluster.size();
  if (n > limits.max_vertices || k > limits.max_devices || n > 31) {
    throw Error(ErrorCode::instance_too_large,
                fmt::format("instance too large: {} vertices on {} devices (limit {} / {})", n, k,
                            limits.max_vertices, limits.max_devices));
  }
  const auto& topo = graph.topological_order();

  std::vector<Mask> reaches(n, 0);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    for (EdgeId e : graph.out_edges(*it)) {
      const VertexId dst = graph.edge(e).dst;
      reaches[*it] |= reaches[dst] | (Mask{1} << dst);
    }
  }

  const auto num_groups = groups.size();
  std::vector<double> footprint(num_groups);
  std::vector<std::vector<DeviceId>> choices(num_groups);
  for (GroupId g = 0; g < num_groups; ++g) {
    footprint[g] = static_footprint(groups.members(g), graph);
    for (DeviceId d = 0; d < k; ++d) {
      if (!groups.constraint(g) || *groups.constraint(g) == d) choices[g].push_back(d);
    }
    if (choices[g].empty()) throw Error(ErrorCode::infeasible_instance, "infeasible instance: no admissible device");
  }

  OptimalSolution best;
  best.makespan = INFINITY;
  best.num_vertices = n;
  best.num_devices = k;
  bool found = false;

  std::vector<std::size_t> digit(num_groups, 0);
  std::vector<DeviceId> assignment(n);
  for (;;) {
    std::vector<double> used(k, 0.0);
    std::vector<double> load(k, 0.0);
    for (GroupId g = 0; g < num_groups; ++g) {
      const DeviceId d = choices[g][digit[g]];
      used[d] += footprint[g];
      for (VertexId v : groups.members(g)) {
        assignment[v] = d;
        load[d] += exec_time(graph.vertex(v), cluster.device(d));
      }
    }
    bool admissible = true;
    for (DeviceId d = 0; d < k; ++d) admissible = admissible && within(used[d], cluster.device(d).memory);

    const double bound = k ? *std::max_element(load.begin(), load.end()) : 0.0;
    if (admissible) {
      found = true;
      ++best.assignments_explored;
    }
    if (admissible && bound < best.makespan) {
      std::vector<std::vector<std::vector<VertexId>>> orders(k);
      for (DeviceId d = 0; d < k; ++d) {
        std::vector<VertexId> members;
        for (VertexId v : topo) {
          if (assignment[v] == d) members.push_back(v);
        }
        std::sort(members.begin(), members.end());
        std::vector<VertexId> prefix;
        linear_extensions(members, reaches, prefix, 0, orders[d]);
      }

      std::vector<std::size_t> pick(k, 0);
      std::vector<std::vector<VertexId>> current(k);
      for (;;) {
        for (DeviceId d = 0; d < k; ++d) current[d] = orders[d][pick[d]];
        ++best.schedules_explored;
        const auto makespan = evaluate_orders(graph, cluster, assignment, current);
        if (makespan && *makespan < best.makespan) {
          best.makespan = *makespan;
          best.partition = Partition{assignment, "oracle", std::nullopt};
          best.device_order = current;
        }
        std::size_t d = 0;
        while (d < k && ++pick[d] == orders[d].size()) pick[d++] = 0;
        if (d == k) break;
      }
    }

    // Odometer with group 0 most significant: lexicographic assignment order.
    std::size_t g = num_groups;
    while (g > 0 && ++digit[g - 1] == choices[g - 1].size()) digit[--g] = 0;
    if (g == 0) break;
  }

  if (!found) throw Error(ErrorCode::infeasible_instance, "infeasible instance: memory bound excludes every assignment");
  if (n == 0) {
    best.makespan = 0.0;
    best.partition = Partition{{}, "oracle", std::nullopt};
    best.device_order.assign(k, {});
  }
  return best;
}

bool decision(const DataflowGraph& graph, const DeviceCluster& cluster, const CollocationGroups& groups,
              double t_max, Limits limits) {
  return optimal(graph, cluster, groups, limits).makespan < t_max;
}

}  // namespace flowpart::oracle
