#include "flowpart/workbench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include <fmt/core.h>

#include "flowpart/constraints.hpp"
#include "flowpart/error.hpp"
#include "flowpart/random.hpp"

namespace flowpart {

namespace {

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || (positive ? !(r.lo > 0.0) : !(r.lo >= 0.0))) {
    throw Error(ErrorCode::invalid_instance, fmt::format("invalid {} range [{}, {}]", name, r.lo, r.hi));
  }
}

struct Layering {
  std::vector<std::size_t> layer_of;  // per vertex
  std::vector<std::size_t> first;     // first vertex of each layer, plus n
};

Layering make_layers(std::size_t n, std::size_t layers) {
  Layering out;
  out.layer_of.resize(n);
  out.first.assign(layers + 1, n);
  for (std::size_t v = n; v-- > 0;) {
    out.layer_of[v] = v * layers / n;
    out.first[out.layer_of[v]] = v;
  }
  return out;
}

// First-fit decreasing with pinned groups placed first.
bool packs(const DataflowGraph& graph, const std::vector<double>& capacity, const CollocationGroups& groups) {
  std::vector<double> spare = capacity;
  std::vector<std::pair<double, GroupId>> loose;
  for (GroupId g = 0; g < groups.size(); ++g) {
    const double need = static_footprint(groups.members(g), graph);
    if (auto d = groups.constraint(g)) {
      if (spare[*d] < need) return false;
      spare[*d] -= need;
    } else {
      loose.emplace_back(need, g);
    }
  }
  std::sort(loose.begin(), loose.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (const auto& [need, g] : loose) {
    auto roomiest = std::max_element(spare.begin(), spare.end());
    if (*roomiest < need) return false;
    *roomiest -= need;
  }
  return true;
}

}  // namespace

void validate(const GeneratorParams& params) {
  check_range(params.cost, "cost", false);
  check_range(params.volume, "volume", false);
  check_range(params.speed, "speed", true);
  check_range(params.bandwidth, "bandwidth", true);
  if (params.memory) check_range(*params.memory, "memory", true);
  if (params.devices == 0) throw Error(ErrorCode::invalid_instance, "at least one device is required");
  if (!(params.avg_degree >= 0.0)) throw Error(ErrorCode::invalid_instance, "average degree must be non-negative");
  if (!(params.colocation_fraction >= 0.0 && params.colocation_fraction <= 1.0) ||
      !(params.device_constraint_fraction >= 0.0 && params.device_constraint_fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_instance, "fractions must lie in [0, 1]");
  }
}

Instance generate_instance(const GeneratorParams& params) {
  validate(params);
  Rng rng(params.seed);
  const std::size_t n = params.vertices;
  auto target_edges = static_cast<std::size_t>(std::llround(params.avg_degree * static_cast<double>(n)));
  const std::size_t layers =
      n == 0 ? 0 : std::clamp<std::size_t>(params.layers ? params.layers : std::llround(std::sqrt(double(n))), 1, n);

  std::vector<VertexRecord> vertices(n);
  for (std::size_t v = 0; v < n; ++v) {
    vertices[v].id = fmt::format("v{}", v);
    vertices[v].cost = uniform_real(rng, params.cost.lo, params.cost.hi);
  }

  std::vector<EdgeRecord> edges;
  if (n > 0) {
    const auto layering = make_layers(n, layers);
    const std::size_t first_layer = layering.first[1];
    const std::size_t max_edges = [&] {
      std::size_t total = 0;
      for (std::size_t v = first_layer; v < n; ++v) total += layering.first[layering.layer_of[v]];
      return total;
    }();
    // A lone layer has no room for edges at any density.
    if (max_edges == 0) target_edges = 0;
    if (target_edges > max_edges) {
      throw Error(ErrorCode::invalid_instance,
                  fmt::format("{} edges do not fit {} vertices in {} layers (at most {})", target_edges, n, layers,
                              max_edges));
    }

    std::set<std::pair<VertexId, VertexId>> present;
    auto add = [&](std::size_t u, std::size_t v) {
      if (!present.emplace(u, v).second) return false;
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), 0.0});
      return true;
    };
    auto pick = [&](std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo); };

    for (std::size_t v = first_layer; v < n && edges.size() < target_edges; ++v) {
      const std::size_t layer = layering.layer_of[v];
      add(pick(layering.first[layer - 1], layering.first[layer]), v);
    }

    if (edges.size() < target_edges && 2 * target_edges > max_edges) {
      std::vector<std::pair<std::size_t, std::size_t>> open;
      for (std::size_t v = first_layer; v < n; ++v) {
        for (std::size_t u = 0; u < layering.first[layering.layer_of[v]]; ++u) {
          if (!present.count({static_cast<VertexId>(u), static_cast<VertexId>(v)})) open.emplace_back(u, v);
        }
      }
      for (std::size_t i = open.size(); i > 1; --i) std::swap(open[i - 1], open[uniform_index(rng, i)]);
      for (std::size_t i = 0; edges.size() < target_edges; ++i) add(open[i].first, open[i].second);
    }
    // Half of the extra edges come from the previous layer, the rest from
    // anywhere earlier.
    while (edges.size() < target_edges) {
      const std::size_t v = pick(first_layer, n);
      const std::size_t layer = layering.layer_of[v];
      const std::size_t u = uniform01(rng) < 0.5 ? pick(layering.first[layer - 1], layering.first[layer])
                                                  : pick(0, layering.first[layer]);
      add(u, v);
    }
    std::sort(edges.begin(), edges.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
      return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });
    for (auto& e : edges) e.volume = uniform_real(rng, params.volume.lo, params.volume.hi);
  }

  // Collocation groups from edge endpoints, bounded in size.
  std::vector<std::size_t> root(n), size(n, 1);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  const auto colocated_target =
      static_cast<std::size_t>(std::llround(params.colocation_fraction * static_cast<double>(n)));
  std::size_t colocated = 0;
  for (std::size_t attempt = 0; colocated < colocated_target && !edges.empty() && attempt < 20 * n; ++attempt) {
    const auto& e = edges[uniform_index(rng, edges.size())];
    std::size_t a = find(e.src), b = find(e.dst);
    if (a == b || size[a] + size[b] > params.max_group_size) continue;
    colocated += (size[a] == 1) + (size[b] == 1);
    if (b < a) std::swap(a, b);
    root[b] = a;
    size[a] += size[b];
  }
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = find(v);
    if (size[r] > 1) vertices[v].colocation_group = fmt::format("g{}", r);
  }

  std::vector<std::optional<DeviceId>> group_pin(n);
  const auto pinned_target =
      static_cast<std::size_t>(std::llround(params.device_constraint_fraction * static_cast<double>(n)));
  for (std::size_t i = 0; i < pinned_target; ++i) {
    const std::size_t v = uniform_index(rng, n);
    auto& pin = group_pin[find(v)];
    if (!pin) pin = static_cast<DeviceId>(uniform_index(rng, params.devices));
    vertices[v].device_constraint = pin;
  }

  std::vector<DeviceRecord> devices(params.devices);
  for (std::size_t d = 0; d < params.devices; ++d) {
    devices[d].id = fmt::format("d{}", d);
    devices[d].speed = uniform_real(rng, params.speed.lo, params.speed.hi);
  }
  Range memory;
  if (params.memory) {
    memory = *params.memory;
  } else {
    const double expected_total =
        static_cast<double>(target_edges) * 0.5 * (params.volume.lo + params.volume.hi);
    const double share = std::max(1.0, expected_total / static_cast<double>(params.devices));
    memory = {2.0 * share, 6.0 * share};
  }
  for (auto& d : devices) d.memory = uniform_real(rng, memory.lo, memory.hi);

  std::vector<double> bandwidth(params.devices * params.devices, 0.0);
  for (std::size_t i = 0; i < params.devices; ++i) {
    for (std::size_t j = 0; j < params.devices; ++j) {
      if (i != j) bandwidth[i * params.devices + j] = uniform_real(rng, params.bandwidth.lo, params.bandwidth.hi);
    }
  }

  DataflowGraph graph(std::move(vertices), std::move(edges));
  const auto groups = build_groups(graph);
  std::vector<double> capacity(devices.size());
  for (std::size_t d = 0; d < devices.size(); ++d) capacity[d] = devices[d].memory;
  while (!packs(graph, capacity, groups)) {
    for (std::size_t d = 0; d < devices.size(); ++d) capacity[d] = devices[d].memory *= 1.5;
  }
  return {std::move(graph), DeviceCluster(std::move(devices), std::move(bandwidth))};
}

}  // namespace flowpart
