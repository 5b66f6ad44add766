#include "flowpart/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

#include <fmt/core.h>

#include "flowpart/error.hpp"

namespace flowpart {

DataflowGraph::DataflowGraph(std::vector<VertexRecord> vertices,
                             std::vector<EdgeRecord> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const auto n = vertices_.size();
  out_.resize(n);
  in_.resize(n);
  for (VertexId v = 0; v < n; ++v) by_name_.try_emplace(vertices_[v].id, v);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.src >= n || edge.dst >= n) continue;
    out_[edge.src].push_back(e);
    in_[edge.dst].push_back(e);
  }

  std::vector<std::size_t> pending(n);
  std::deque<VertexId> ready;
  for (VertexId v = 0; v < n; ++v) {
    pending[v] = in_[v].size();
    if (pending[v] == 0) ready.push_back(v);
  }
  topo_.reserve(n);
  while (!ready.empty()) {
    const VertexId v = ready.front();
    ready.pop_front();
    topo_.push_back(v);
    for (EdgeId e : out_[v]) {
      if (--pending[edges_[e].dst] == 0) ready.push_back(edges_[e].dst);
    }
  }
  acyclic_ = topo_.size() == n;
}

std::optional<VertexId> DataflowGraph::find(std::string_view id) const {
  auto it = by_name_.find(std::string(id));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const std::vector<VertexId>& DataflowGraph::topological_order() const {
  if (!acyclic_) throw Error(ErrorCode::cyclic_graph, "graph contains a cycle");
  return topo_;
}

namespace {

// Every vertex left over by Kahn's algorithm has a leftover predecessor, so
// walking predecessors inside that set must revisit a vertex.
std::vector<VertexId> find_cycle(const DataflowGraph& graph) {
  const auto n = graph.num_vertices();
  std::vector<bool> done(n, false);
  std::vector<std::size_t> pending(n);
  std::deque<VertexId> ready;
  for (VertexId v = 0; v < n; ++v) {
    pending[v] = graph.in_edges(v).size();
    if (pending[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    const VertexId v = ready.front();
    ready.pop_front();
    done[v] = true;
    for (EdgeId e : graph.out_edges(v)) {
      if (--pending[graph.edge(e).dst] == 0) ready.push_back(graph.edge(e).dst);
    }
  }
  auto start = std::find(done.begin(), done.end(), false);
  if (start == done.end()) return {};

  std::vector<std::size_t> seen_at(n, SIZE_MAX);
  std::vector<VertexId> walk;
  VertexId v = static_cast<VertexId>(start - done.begin());
  while (seen_at[v] == SIZE_MAX) {
    seen_at[v] = walk.size();
    walk.push_back(v);
    for (EdgeId e : graph.in_edges(v)) {
      const VertexId u = graph.edge(e).src;
      if (!done[u] && u != v) {
        v = u;
        break;
      }
    }
  }
  std::vector<VertexId> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[v]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  return cycle;
}

}  // namespace

ViolationList validate_dag(const DataflowGraph& graph) {
  ViolationList out;
  const auto n = graph.num_vertices();

  std::set<std::string_view> names;
  for (VertexId v = 0; v < n; ++v) {
    const auto& vertex = graph.vertex(v);
    if (!names.insert(vertex.id).second) {
      out.push_back({ViolationKind::duplicate_vertex,
                     fmt::format("duplicate vertex id '{}'", vertex.id)});
    }
    if (!(vertex.cost >= 0.0)) {
      out.push_back({ViolationKind::negative_cost,
                     fmt::format("vertex '{}' has negative cost {}", vertex.id, vertex.cost)});
    }
  }

  auto name = [&](VertexId v) {
    return v < n ? graph.vertex(v).id : fmt::format("#{}", v);
  };
  std::set<std::pair<VertexId, VertexId>> pairs;
  bool has_self_loop = false;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& edge = graph.edge(e);
    if (edge.src >= n || edge.dst >= n) {
      out.push_back({ViolationKind::unknown_endpoint,
                     fmt::format("unknown endpoint in edge {} -> {}", name(edge.src), name(edge.dst))});
      continue;
    }
    if (edge.src == edge.dst) {
      has_self_loop = true;
      out.push_back({ViolationKind::self_loop, fmt::format("self-loop on '{}'", name(edge.src))});
    } else if (!pairs.emplace(edge.src, edge.dst).second) {
      out.push_back({ViolationKind::duplicate_edge,
                     fmt::format("duplicate edge {} -> {}", name(edge.src), name(edge.dst))});
    }
    if (!(edge.volume >= 0.0)) {
      out.push_back({ViolationKind::negative_volume,
                     fmt::format("edge {} -> {} has negative volume {}", name(edge.src),
                                 name(edge.dst), edge.volume)});
    }
  }

  if (!graph.is_acyclic()) {
    const auto cycle = find_cycle(graph);
    if (cycle.size() > 1 || !has_self_loop) {
      std::string members;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) members += ',';
        members += name(cycle[i]);
      }
      out.push_back({ViolationKind::cycle, fmt::format("cycle {{{}}}", members)});
    }
  }
  return out;
}

DataflowGraph add_virtual_sink(const DataflowGraph& graph) {
  if (graph.empty()) throw Error(ErrorCode::empty_graph, "graph has no sinks to connect");
  (void)graph.topological_order();

  std::vector<VertexRecord> vertices(graph.vertices().begin(), graph.vertices().end());
  std::vector<EdgeRecord> edges(graph.edges().begin(), graph.edges().end());
  std::string name = "__sink";
  while (graph.find(name)) name += '_';

  const auto sink = static_cast<VertexId>(vertices.size());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (graph.is_sink(v)) edges.push_back({v, sink, 0.0});
  }
  vertices.push_back({name, 0.0, std::nullopt, std::nullopt});
  return DataflowGraph(std::move(vertices), std::move(edges));
}

std::vector<double> up_rank(const DataflowGraph& graph) {
  const auto& order = graph.topological_order();
  std::vector<double> up(graph.num_vertices(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double best = 0.0;
    for (EdgeId e : graph.out_edges(*it)) best = std::max(best, up[graph.edge(e).dst]);
    up[*it] = best + graph.vertex(*it).cost;
  }
  return up;
}

std::vector<double> down_rank(const DataflowGraph& graph) {
  const auto& order = graph.topological_order();
  std::vector<double> down(graph.num_vertices(), 0.0);
  for (VertexId v : order) {
    double best = 0.0;
    for (EdgeId e : graph.in_edges(v)) best = std::max(best, down[graph.edge(e).src]);
    down[v] = best + graph.vertex(v).cost;
  }
  return down;
}

RankTable total_rank(const DataflowGraph& graph) {
  RankTable table{up_rank(graph), down_rank(graph), {}};
  table.total.resize(graph.num_vertices());
  for (std::size_t v = 0; v < table.total.size(); ++v) table.total[v] = table.up[v] + table.down[v];
  return table;
}

std::vector<VertexId> critical_path(const DataflowGraph& graph) {
  if (graph.empty()) throw Error(ErrorCode::empty_graph, "critical path of an empty graph");
  const auto down = down_rank(graph);

  std::optional<VertexId> current;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (graph.is_sink(v) && (!current || down[v] > down[*current])) current = v;
  }

  std::vector<VertexId> path{*current};
  while (!graph.is_source(*current)) {
    std::optional<VertexId> best;
    for (EdgeId e : graph.in_edges(*current)) {
      const VertexId u = graph.edge(e).src;
      if (!best || down[u] > down[*best] || (down[u] == down[*best] && u < *best)) best = u;
    }
    current = best;
    path.push_back(*current);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_cost(const DataflowGraph& graph, std::span<const VertexId> path) {
  double sum = 0.0;
  for (VertexId v : path) sum += graph.vertex(v).cost;
  return sum;
}

}  // namespace flowpart
