#pragma once

#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"

namespace flowpart {

struct Instance {
  DataflowGraph graph;
  DeviceCluster cluster;

  bool operator==(const Instance&) const = default;
};

}  // namespace flowpart
