#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"

namespace fixtures {

using namespace flowpart;

struct E {
  VertexId src;
  VertexId dst;
  double volume = 0.0;
};

// Vertices are named v1..vn; index i holds v(i+1).
inline DataflowGraph graph_of(const std::vector<double>& costs, const std::vector<E>& edges) {
  std::vector<VertexRecord> vertices;
  for (std::size_t i = 0; i < costs.size(); ++i) vertices.push_back({"v" + std::to_string(i + 1), costs[i]});
  std::vector<EdgeRecord> records;
  for (const auto& e : edges) records.push_back({e.src, e.dst, e.volume});
  return {std::move(vertices), std::move(records)};
}

// v1 -> {v2, v3} -> v4, costs (2,3,4,1).
inline DataflowGraph diamond(double volume = 10.0) {
  return graph_of({2, 3, 4, 1}, {{0, 1, volume}, {0, 2, volume}, {1, 3, volume}, {2, 3, volume}});
}

inline DataflowGraph chain(const std::vector<double>& costs, double volume = 0.0) {
  std::vector<E> edges;
  for (VertexId i = 0; i + 1 < costs.size(); ++i) edges.push_back({i, i + 1, volume});
  return graph_of(costs, edges);
}

// Devices named d1..dk with a uniform off-diagonal bandwidth.
inline DeviceCluster cluster_of(const std::vector<double>& speeds, const std::vector<double>& memory,
                                double bandwidth = 1.0) {
  std::vector<DeviceRecord> devices;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    devices.push_back({"d" + std::to_string(i + 1), speeds[i], memory[i]});
  }
  std::vector<double> matrix(speeds.size() * speeds.size(), bandwidth);
  for (std::size_t i = 0; i < speeds.size(); ++i) matrix[i * speeds.size() + i] = 0.0;
  return {std::move(devices), std::move(matrix)};
}

inline DeviceCluster uniform_cluster(std::size_t k, double speed = 1.0, double memory = 1e9,
                                     double bandwidth = 1.0) {
  return cluster_of(std::vector<double>(k, speed), std::vector<double>(k, memory), bandwidth);
}

inline Partition partition_of(std::vector<DeviceId> assignment) { return {std::move(assignment), "fixed", {}}; }

// Quarter-unit values keep sums exact in double arithmetic.
inline double quarter(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(4 * lo, 4 * hi)(rng) / 4.0;
}

// Random DAG on n vertices: edge i->j (i<j) with probability p, vertices
// then shuffled so ids do not follow topological order.
inline DataflowGraph random_dag(std::mt19937_64& rng, std::size_t n, double p, int max_cost = 10,
                                int max_volume = 0) {
  std::vector<VertexId> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<VertexId>(i);
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<double> costs(n);
  for (auto& c : costs) c = quarter(rng, 0, max_cost);
  std::vector<E> edges;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({label[i], label[j], max_volume > 0 ? quarter(rng, 0, max_volume) : 0.0});
    }
  }
  return graph_of(costs, edges);
}

}  // namespace fixtures
