#include "detail.hpp"
#include "flowpart/random.hpp"

namespace flowpart {

Partition hash_partition(const DataflowGraph& graph, const DeviceCluster& cluster,
                         const CollocationGroups& groups, std::uint64_t seed) {
  PlacementState state(graph, cluster, groups);
  Rng rng(seed);
  for (GroupId g = 0; g < groups.size(); ++g) {
    const auto devices = detail::require_feasible(g, state);
    double total = 0.0;
    for (DeviceId d : devices) total += cluster.device(d).memory;
    const double draw = uniform01(rng) * total;
    DeviceId chosen = devices.back();
    double cumulative = 0.0;
    for (DeviceId d : devices) {
      cumulative += cluster.device(d).memory;
      if (draw < cumulative) {
        chosen = d;
        break;
      }
    }
    state.assign(g, chosen);
  }
  return detail::finish(state, Strategy::hash, seed);
}

}  // namespace flowpart
