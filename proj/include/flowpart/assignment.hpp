#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowpart/graph.hpp"

namespace flowpart {

/// Total mapping vertex -> device, plus provenance.
struct Partition {
  std::vector<DeviceId> assignment;  // indexed by VertexId
  std::string strategy;
  std::optional<std::uint64_t> seed;

  DeviceId device_of(VertexId v) const { return assignment[v]; }
};

}  // namespace flowpart
