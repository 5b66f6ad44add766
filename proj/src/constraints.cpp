#include "flowpart/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <fmt/core.h>

#include "flowpart/error.hpp"

namespace flowpart {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), VertexId{0}); }

  VertexId find(VertexId v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<VertexId> parent_;
};

bool approx_le(double a, double b) { return a <= b + 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

CollocationGroups build_groups(std::size_t num_vertices,
                               std::span<const std::pair<VertexId, VertexId>> pairs,
                               std::span<const std::optional<DeviceId>> device_constraints,
                               const DataflowGraph* graph) {
  DisjointSets sets(num_vertices);
  for (const auto& [a, b] : pairs) sets.unite(a, b);

  CollocationGroups groups;
  groups.group_of_.assign(num_vertices, 0);
  std::vector<std::optional<GroupId>> group_of_root(num_vertices);
  for (VertexId v = 0; v < num_vertices; ++v) {
    const VertexId root = sets.find(v);
    if (!group_of_root[root]) {
      group_of_root[root] = static_cast<GroupId>(groups.members_.size());
      groups.members_.emplace_back();
      groups.constraint_.emplace_back();
    }
    const GroupId g = *group_of_root[root];
    groups.group_of_[v] = g;
    groups.members_[g].push_back(v);

    const auto& pinned = device_constraints[v];
    auto& merged = groups.constraint_[g];
    if (!pinned) continue;
    if (merged && *merged != *pinned) {
      const auto name = graph ? graph->vertex(v).id : fmt::format("#{}", v);
      throw Error(ErrorCode::contradictory_constraints,
                  fmt::format("contradictory device constraints in the collocation group of '{}'", name));
    }
    merged = pinned;
  }
  return groups;
}

CollocationGroups build_groups(const DataflowGraph& graph) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::map<std::string, VertexId> first_member;
  std::vector<std::optional<DeviceId>> pinned(graph.num_vertices());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    const auto& vertex = graph.vertex(v);
    pinned[v] = vertex.device_constraint;
    if (!vertex.colocation_group) continue;
    auto [it, inserted] = first_member.try_emplace(*vertex.colocation_group, v);
    if (!inserted) pairs.emplace_back(it->second, v);
  }
  return build_groups(graph.num_vertices(), pairs, pinned, &graph);
}

double static_footprint(std::span<const VertexId> vertices, const DataflowGraph& graph) {
  double sum = 0.0;
  for (VertexId v : vertices) {
    for (EdgeId e : graph.in_edges(v)) sum += graph.edge(e).volume;
  }
  return sum;
}

PlacementState::PlacementState(const DataflowGraph& graph, const DeviceCluster& cluster,
                               const CollocationGroups& groups)
    : graph_(&graph),
      cluster_(&cluster),
      groups_(&groups),
      group_device_(groups.size()),
      used_(cluster.size(), 0.0),
      load_(cluster.size(), 0.0),
      footprint_(groups.size(), 0.0),
      cost_(groups.size(), 0.0) {
  for (GroupId g = 0; g < groups.size(); ++g) {
    footprint_[g] = static_footprint(groups.members(g), graph);
    for (VertexId v : groups.members(g)) cost_[g] += graph.vertex(v).cost;
  }
}

void PlacementState::assign(GroupId g, DeviceId d) {
  if (group_device_[g]) throw Error(ErrorCode::internal, "group assigned twice");
  group_device_[g] = d;
  used_[d] += footprint_[g];
  load_[d] += exec_time(cost_[g], cluster_->device(d));
}

bool PlacementState::complete() const {
  return std::all_of(group_device_.begin(), group_device_.end(), [](const auto& d) { return d.has_value(); });
}

Partition PlacementState::to_partition(std::string strategy, std::optional<std::uint64_t> seed) const {
  if (!complete()) throw Error(ErrorCode::internal, "placement is incomplete");
  Partition p{std::vector<DeviceId>(graph_->num_vertices()), std::move(strategy), seed};
  for (VertexId v = 0; v < graph_->num_vertices(); ++v) p.assignment[v] = *device_of(v);
  return p;
}

std::vector<DeviceId> feasible_devices(GroupId group, const CollocationGroups& groups,
                                       const DeviceCluster& cluster, const PlacementState& state) {
  if (auto pinned = state.device_of_group(group)) return {*pinned};
  std::vector<DeviceId> out;
  const auto constraint = groups.constraint(group);
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    if (constraint && *constraint != d) continue;
    if (state.spare_memory(d) >= state.footprint(group)) out.push_back(d);
  }
  return out;
}

namespace {

// Totality, device range, collocation and device constraints. Returns false
// if the partition is too malformed for further checks.
bool check_assignment(const DataflowGraph& graph, const DeviceCluster& cluster,
                      const Partition& partition, ViolationList& out) {
  if (partition.assignment.size() != graph.num_vertices()) {
    out.push_back({ViolationKind::incomplete_partition,
                   fmt::format("partition covers {} of {} vertices", partition.assignment.size(),
                               graph.num_vertices())});
    return false;
  }
  bool ok = true;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (partition.assignment[v] >= cluster.size()) {
      out.push_back({ViolationKind::unknown_device,
                     fmt::format("vertex '{}' assigned to unknown device #{}", graph.vertex(v).id,
                                 partition.assignment[v])});
      ok = false;
    }
  }
  if (!ok) return false;

  std::map<std::string, VertexId> first_member;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    const auto& vertex = graph.vertex(v);
    const DeviceId d = partition.assignment[v];
    if (vertex.device_constraint && *vertex.device_constraint != d) {
      out.push_back({ViolationKind::device_constraint,
                     fmt::format("vertex '{}' pinned to device #{} but placed on '{}'", vertex.id,
                                 *vertex.device_constraint, cluster.device(d).id)});
    }
    if (!vertex.colocation_group) continue;
    auto [it, inserted] = first_member.try_emplace(*vertex.colocation_group, v);
    if (!inserted && partition.assignment[it->second] != d) {
      out.push_back({ViolationKind::collocation,
                     fmt::format("collocation: '{}' on '{}' but '{}' on '{}'", graph.vertex(it->second).id,
                                 cluster.device(partition.assignment[it->second]).id, vertex.id,
                                 cluster.device(d).id)});
    }
  }
  return true;
}

bool approx_ge(double a, double b) { return a >= b - 1e-9 * std::max(1.0, std::abs(b)); }
bool approx_eq(double a, double b) { return approx_ge(a, b) && approx_ge(b, a); }

}  // namespace

ViolationList check_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                              const CollocationGroups& groups, const Partition& partition) {
  ViolationList out;
  if (!check_assignment(graph, cluster, partition, out)) return out;
  for (GroupId g = 0; g < groups.size(); ++g) {
    const auto members = groups.members(g);
    for (VertexId v : members) {
      if (partition.assignment[v] != partition.assignment[members.front()]) {
        out.push_back({ViolationKind::collocation,
                       fmt::format("collocation group of '{}' is split", graph.vertex(members.front()).id)});
        break;
      }
    }
  }
  std::vector<double> used(cluster.size(), 0.0);
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    for (EdgeId e : graph.in_edges(v)) used[partition.assignment[v]] += graph.edge(e).volume;
  }
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    if (!approx_le(used[d], cluster.device(d).memory)) {
      out.push_back({ViolationKind::memory,
                     fmt::format("static footprint {} exceeds capacity {} on '{}'", used[d],
                                 cluster.device(d).memory, cluster.device(d).id)});
    }
  }
  return out;
}

ViolationList validate_solution(const DataflowGraph& graph, const DeviceCluster& cluster,
                                const Partition& partition, const ExecutionTrace& trace) {
  ViolationList out;
  if (!check_assignment(graph, cluster, partition, out)) return out;
  if (trace.vertices.size() != graph.num_vertices() || trace.transfers.size() != graph.num_edges() ||
      trace.device_order.size() != cluster.size()) {
    out.push_back({ViolationKind::execution_count, "trace does not cover the graph"});
    return out;
  }

  auto vname = [&](VertexId v) -> const std::string& { return graph.vertex(v).id; };

  std::vector<int> seen(graph.num_vertices(), 0);
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    for (VertexId v : trace.device_order[d]) {
      if (v >= graph.num_vertices()) {
        out.push_back({ViolationKind::execution_count, fmt::format("unknown vertex #{} executed", v)});
        continue;
      }
      ++seen[v];
      if (partition.assignment[v] != d) {
        out.push_back({ViolationKind::execution_count,
                       fmt::format("'{}' executed on '{}' but assigned elsewhere", vname(v), cluster.device(d).id)});
      }
    }
  }
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (seen[v] != 1) {
      out.push_back({ViolationKind::execution_count,
                     fmt::format("'{}' executed {} times", vname(v), seen[v])});
    }
    const auto& t = trace.vertices[v];
    if (t.device != partition.assignment[v]) {
      out.push_back({ViolationKind::execution_count,
                     fmt::format("'{}' timed on a device other than its assignment", vname(v))});
      continue;
    }
    const double expected = t.start + exec_time(graph.vertex(v), cluster.device(t.device));
    if (!(t.start >= 0.0) || !approx_eq(t.finish, expected)) {
      out.push_back({ViolationKind::duration,
                     fmt::format("'{}' runs [{}, {}], expected finish {}", vname(v), t.start, t.finish, expected)});
    }
  }

  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& edge = graph.edge(e);
    const auto& transfer = trace.transfers[e];
    const DeviceId from = partition.assignment[edge.src];
    const DeviceId to = partition.assignment[edge.dst];
    const auto label = fmt::format("{} -> {}", vname(edge.src), vname(edge.dst));
    if (transfer.src_device != from || transfer.dst_device != to) {
      out.push_back({ViolationKind::precedence, fmt::format("tensor {} moved between wrong devices", label)});
      continue;
    }
    double needed = 0.0;
    try {
      needed = transfer_time(edge, from, to, cluster);
    } catch (const Error&) {
      out.push_back({ViolationKind::precedence, fmt::format("tensor {} crosses an unreachable link", label)});
      continue;
    }
    if (!approx_ge(transfer.start, trace.vertices[edge.src].finish) ||
        !approx_ge(transfer.end - transfer.start, needed) ||
        !approx_ge(trace.vertices[edge.dst].start, transfer.end)) {
      out.push_back({ViolationKind::precedence,
                     fmt::format("'{}' starts at {} before tensor {} arrives at {}", vname(edge.dst),
                                 trace.vertices[edge.dst].start, label, transfer.end)});
    }
  }

  for (DeviceId d = 0; d < cluster.size(); ++d) {
    std::vector<VertexId> order;
    for (VertexId v : trace.device_order[d]) {
      if (v < graph.num_vertices()) order.push_back(v);
    }
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
      const auto& ta = trace.vertices[a];
      const auto& tb = trace.vertices[b];
      return ta.start != tb.start ? ta.start < tb.start : ta.finish < tb.finish;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
      const auto& prev = trace.vertices[order[i - 1]];
      const auto& next = trace.vertices[order[i]];
      if (!approx_ge(next.start, prev.finish)) {
        out.push_back({ViolationKind::device_exclusivity,
                       fmt::format("device exclusivity: '{}' and '{}' overlap on '{}'", vname(order[i - 1]),
                                   vname(order[i]), cluster.device(d).id)});
      }
    }
  }

  const auto peaks = peak_memory(trace, graph, cluster.size());
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    if (peaks[d].volume >= cluster.device(d).memory) {
      out.push_back({ViolationKind::memory,
                     fmt::format("active volume {} reaches capacity {} on '{}' at time {}", peaks[d].volume,
                                 cluster.device(d).memory, cluster.device(d).id, peaks[d].time)});
    }
  }
  return out;
}

}  // namespace flowpart
