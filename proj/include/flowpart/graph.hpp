#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowpart/violation.hpp"

namespace flowpart {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using DeviceId = std::uint32_t;

struct VertexRecord {
  std::string id;
  double cost = 0.0;  // operations
  std::optional<std::string> colocation_group;
  std::optional<DeviceId> device_constraint;

  bool operator==(const VertexRecord&) const = default;
};

struct EdgeRecord {
  VertexId src = 0;
  VertexId dst = 0;
  double volume = 0.0;  // bytes

  bool operator==(const EdgeRecord&) const = default;
};

/// Directed acyclic dataflow graph. Vertices and edges are addressed by their
/// position; VertexRecord::id is the external name used in files and reports.
///
/// The graph is immutable after construction. Construction never throws on
/// structural defects (unknown endpoints, cycles, duplicates); those are
/// reported by validate_dag(). Edges with out-of-range endpoints are kept in
/// the edge list but excluded from the adjacency indexes.
class DataflowGraph {
 public:
  DataflowGraph() = default;
  DataflowGraph(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return vertices_.empty(); }

  const VertexRecord& vertex(VertexId v) const { return vertices_[v]; }
  const EdgeRecord& edge(EdgeId e) const { return edges_[e]; }
  std::span<const VertexRecord> vertices() const { return vertices_; }
  std::span<const EdgeRecord> edges() const { return edges_; }

  std::span<const EdgeId> out_edges(VertexId v) const { return out_[v]; }
  std::span<const EdgeId> in_edges(VertexId v) const { return in_[v]; }
  bool is_source(VertexId v) const { return in_[v].empty(); }
  bool is_sink(VertexId v) const { return out_[v].empty(); }

  std::optional<VertexId> find(std::string_view id) const;

  bool is_acyclic() const { return acyclic_; }

  /// Kahn order, sources seeded in ascending id. Throws Error(cyclic_graph)
  /// unless the graph is acyclic.
  const std::vector<VertexId>& topological_order() const;

  bool operator==(const DataflowGraph& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_;
  }

 private:
  std::vector<VertexRecord> vertices_;
  std::vector<EdgeRecord> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::unordered_map<std::string, VertexId> by_name_;
  std::vector<VertexId> topo_;
  bool acyclic_ = true;
};

ViolationList validate_dag(const DataflowGraph& graph);

/// Connects every sink to one new zero-cost vertex through zero-volume edges.
DataflowGraph add_virtual_sink(const DataflowGraph& graph);

// Longest-path ranks over vertex costs only. A sink's upward rank and a
// source's downward rank equal the vertex's own cost.
std::vector<double> up_rank(const DataflowGraph& graph);
std::vector<double> down_rank(const DataflowGraph& graph);

struct RankTable {
  std::vector<double> up;
  std::vector<double> down;
  std::vector<double> total;  // up + down; the vertex's own cost counts twice
};

RankTable total_rank(const DataflowGraph& graph);

/// Source-to-sink path of maximal summed cost, source first. Walks back from
/// the max-down-rank sink along max-down-rank predecessors; ties go to the
/// smallest vertex id.
std::vector<VertexId> critical_path(const DataflowGraph& graph);

double path_cost(const DataflowGraph& graph, std::span<const VertexId> path);

}  // namespace flowpart
