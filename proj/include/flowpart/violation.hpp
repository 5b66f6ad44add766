#pragma once

#include <string>
#include <vector>

namespace flowpart {

// Constraint breaches are reported as data, never thrown.
enum class ViolationKind {
  duplicate_vertex,
  unknown_endpoint,
  self_loop,
  duplicate_edge,
  negative_cost,
  negative_volume,
  cycle,
  incomplete_partition,
  unknown_device,
  collocation,
  device_constraint,
  memory,
  precedence,
  duration,
  device_exclusivity,
  execution_count,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

using ViolationList = std::vector<Violation>;

bool contains(const ViolationList& violations, ViolationKind kind);

}  // namespace flowpart
