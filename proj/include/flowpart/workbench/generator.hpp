#pragma once

#include <cstdint>
#include <optional>

#include "flowpart/workbench/instance.hpp"

namespace flowpart {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic layered instances. Defaults follow the 50-device evaluation
/// setup and the smallest reference network (347 vertices, 1.53 edges per
/// vertex, ~30% collocated).
struct GeneratorParams {
  std::size_t vertices = 347;
  double avg_degree = 1.53;  // edges / vertices
  Range cost{1.0, 100.0};
  Range volume{1.0, 100.0};
  double colocation_fraction = 0.3;  // share of vertices in non-singleton groups
  std::size_t max_group_size = 8;
  double device_constraint_fraction = 0.0;
  std::size_t devices = 50;
  Range speed{10.0, 100.0};
  Range bandwidth{10.0, 60.0};
  /// Absolute capacity range; unset means 2x..6x the expected per-device
  /// share of total tensor volume.
  std::optional<Range> memory;
  std::size_t layers = 0;  // 0: round(sqrt(vertices))
  std::uint64_t seed = 0;
};

/// Throws Error(invalid_instance) on empty or inverted ranges and
/// non-positive speed/bandwidth/memory bounds.
void validate(const GeneratorParams& params);

/// Layered DAG: vertex ids follow layer order and every edge points to a
/// later layer. Each vertex past the first layer gets one predecessor in the
/// previous layer, then random forward edges fill up to
/// round(avg_degree * vertices). Collocation groups grow by merging the
/// endpoints of random edges. Capacities are scaled up until a first-fit
/// packing of the groups succeeds, so at least one feasible partition
/// exists. Deterministic per seed.
///
/// Throws Error(invalid_instance) if the edge count exceeds what the layer
/// structure can hold.
Instance generate_instance(const GeneratorParams& params);

}  // namespace flowpart
