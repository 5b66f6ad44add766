#include <doctest.h>

#include <random>
#include <sstream>

#include "flowpart/constraints.hpp"
#include "flowpart/partition.hpp"
#include "flowpart/simulate.hpp"
#include "support/fixtures.hpp"
#include "support/instances.hpp"

using namespace flowpart;
using fixtures::partition_of;

namespace {

double naive_peak(const ExecutionTrace& trace, const DataflowGraph& g, DeviceId d) {
  double peak = 0.0;
  for (double t : trace.event_times()) {
    double sum = 0.0;
    for (EdgeId e : active_edges(trace, g, t, d)) sum += g.edge(e).volume;
    peak = std::max(peak, sum);
  }
  return peak;
}

bool same_trace(const ExecutionTrace& a, const ExecutionTrace& b) {
  if (a.vertices.size() != b.vertices.size() || a.transfers.size() != b.transfers.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if (a.vertices[i].start != b.vertices[i].start || a.vertices[i].finish != b.vertices[i].finish ||
        a.vertices[i].device != b.vertices[i].device) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.transfers.size(); ++i) {
    if (a.transfers[i].start != b.transfers[i].start || a.transfers[i].end != b.transfers[i].end) return false;
  }
  return a.device_order == b.device_order;
}

}  // namespace

TEST_CASE("diamond on one device runs serially") {
  const auto g = fixtures::diamond();
  const auto c = fixtures::uniform_cluster(1);
  for (Policy p : all_policies) {
    const auto r = sim::run(g, c, partition_of({0, 0, 0, 0}), p);
    CHECK(r.report.makespan == 10.0);
    CHECK(r.report.utilization[0] == 1.0);
    CHECK(r.report.mean_utilization() == 1.0);
  }
}

TEST_CASE("diamond on two devices overlaps v2 with v3") {
  const auto g = fixtures::diamond(0.0);
  const auto c = fixtures::uniform_cluster(2);
  const auto r = sim::run(g, c, partition_of({0, 1, 0, 0}), Policy::pct);
  CHECK(r.report.makespan == 7.0);
  CHECK(r.report.utilization[1] == 3.0 / 7.0);
  CHECK(r.trace.vertices[1].start == 2.0);
  CHECK(r.trace.vertices[2].start == 2.0);
  CHECK(r.trace.vertices[3].start == 6.0);
  CHECK(r.trace.idle[1].size() == 2);
}

TEST_CASE("split chain pays one transfer") {
  const auto g = fixtures::chain({2, 3}, 10);
  const auto c = fixtures::cluster_of({1, 1}, {100, 100}, 5.0);
  const auto r = sim::run(g, c, partition_of({0, 1}), Policy::fifo);
  CHECK(r.report.makespan == 7.0);
  CHECK(r.trace.transfers[0].start == 2.0);
  CHECK(r.trace.transfers[0].end == 4.0);
}

TEST_CASE("active edges on the serial diamond") {
  const auto g = fixtures::diamond(10.0);
  const auto r = sim::run(g, fixtures::uniform_cluster(1), partition_of({0, 0, 0, 0}), Policy::pct);
  // v1 [0,2], v3 [2,6], v2 [6,9], v4 [9,10]. v3 starts the instant v1
  // finishes, so only v1->v2 stays resident until v2 starts.
  CHECK(r.trace.vertices[2].start == 2.0);
  CHECK(active_edges(r.trace, g, 2.0, 0) == std::vector<EdgeId>{0});
  CHECK(active_edges(r.trace, g, 1.0, 0).empty());
  CHECK(active_edges(r.trace, g, 6.0, 0) == std::vector<EdgeId>{3});
  CHECK(active_edges(r.trace, g, 0.0, 0).empty());
  CHECK(active_edges(r.trace, g, 11.0, 0).empty());
  CHECK(peak_memory(r.trace, g, 1)[0].volume == 10.0);
}

namespace {

// Three producers on d1 feed one consumer on d2; two tensors wait there
// together before the third arrives.
struct FanIn {
  DataflowGraph graph = fixtures::graph_of({1, 1, 1, 1}, {{0, 3, 10}, {1, 3, 10}, {2, 3, 10}});
  Partition partition = partition_of({0, 0, 0, 1});
  sim::SimResult run(double capacity) const {
    return sim::run(graph, fixtures::cluster_of({1, 1}, {100, capacity}, 100.0), partition, Policy::pct);
  }
};

}  // namespace

TEST_CASE("memory breaches are reported") {
  const FanIn f;
  const auto r = f.run(15.0);
  CHECK(r.report.peak_memory[1] == 20.0);
  REQUIRE(r.report.memory_violations.size() == 1);
  CHECK(r.report.memory_violations[0].device == 1);
  CHECK(r.report.memory_violations[0].peak == 20.0);
  CHECK(r.report.memory_violations[0].capacity == 15.0);
  CHECK(r.report.makespan == 4.1);
  CHECK(contains(validate_solution(f.graph, fixtures::cluster_of({1, 1}, {100, 15}, 100.0), f.partition, r.trace),
                 ViolationKind::memory));

  // The bound is strict, so reaching capacity exactly is a breach.
  CHECK(f.run(20.0).report.memory_violations.size() == 1);
  CHECK(f.run(20.5).report.memory_violations.empty());
}

TEST_CASE("trace export") {
  const auto g = fixtures::chain({2, 3}, 10);
  const auto c = fixtures::cluster_of({1, 1}, {100, 100}, 5.0);
  const auto r = sim::run(g, c, partition_of({0, 1}), Policy::fifo);
  std::ostringstream out;
  write_trace(out, r.trace, g, c);
  CHECK(out.str() ==
        "start 0 v1 d1\n"
        "finish 2 v1 d1\n"
        "send 2 v1->v2 d1->d2\n"
        "recv 4 v1->v2 d1->d2\n"
        "start 4 v2 d2\n"
        "finish 7 v2 d2\n");
}

TEST_CASE("simulation properties on random instances") {
  std::mt19937_64 rng(44);
  int runs = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = fixtures::random_instance(rng, {.max_vertices = 10, .max_devices = 4});
    const auto& g = inst.graph;
    const auto& c = inst.cluster;
    const auto groups = build_groups(g);
    const double bound = path_cost(g, critical_path(g)) / c.max_speed();
    for (Strategy s : all_strategies) {
      Partition p;
      try {
        p = make_partition(s, g, c, groups, trial);
      } catch (const std::exception&) {
        continue;
      }
      for (Policy policy : all_policies) {
        CAPTURE(trial);
        CAPTURE(to_string(s));
        CAPTURE(to_string(policy));
        const auto r = sim::run(g, c, p, policy, {}, trial);
        ++runs;

        const auto violations = validate_solution(g, c, p, r.trace);
        CHECK(contains(violations, ViolationKind::memory) == !r.report.memory_violations.empty());
        for (const auto& v : violations) CHECK(v.kind == ViolationKind::memory);

        const auto peaks = peak_memory(r.trace, g, c.size());
        for (DeviceId d = 0; d < c.size(); ++d) CHECK(peaks[d].volume == naive_peak(r.trace, g, d));

        CHECK(r.report.makespan >= bound * (1 - 1e-12));
        CHECK(same_trace(r.trace, sim::run(g, c, p, policy, {}, trial).trace));

        std::size_t executed = 0;
        for (const auto& order : r.trace.device_order) executed += order.size();
        CHECK(executed == g.num_vertices());
      }
    }
  }
  CHECK(runs > 1500);
}

TEST_CASE("doubling every speed halves the makespan") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_dag(rng, 12, 0.3, 10, 0);
    std::vector<double> speeds{1, 2, 3}, doubled{2, 4, 6};
    const auto slow = fixtures::cluster_of(speeds, {1e6, 1e6, 1e6});
    const auto fast = fixtures::cluster_of(doubled, {1e6, 1e6, 1e6});
    std::vector<DeviceId> a(12);
    for (auto& d : a) d = static_cast<DeviceId>(rng() % 3);
    for (Policy p : all_policies) {
      const double m1 = sim::run(g, slow, partition_of(a), p, {}, 5).report.makespan;
      const double m2 = sim::run(g, fast, partition_of(a), p, {}, 5).report.makespan;
      CHECK(m2 == m1 / 2);
    }
  }
}

TEST_CASE("relabelling identical devices keeps the makespan") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_dag(rng, 10, 0.3, 10, 10);
    const auto c = fixtures::uniform_cluster(3, 2.0, 1e6, 4.0);
    std::vector<DeviceId> a(10), b(10);
    const DeviceId perm[] = {2, 0, 1};
    for (std::size_t v = 0; v < 10; ++v) {
      a[v] = static_cast<DeviceId>(rng() % 3);
      b[v] = perm[a[v]];
    }
    CHECK(sim::run(g, c, partition_of(a), Policy::pct).report.makespan ==
          sim::run(g, c, partition_of(b), Policy::pct).report.makespan);
  }
}

TEST_CASE("pct on one device runs ready vertices by decreasing pct") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_dag(rng, 10, 0.25);
    const auto c = fixtures::uniform_cluster(1);
    const auto p = partition_of(std::vector<DeviceId>(10, 0));
    const auto pct = compute_pct(g, c, p);
    const auto r = sim::run(g, c, p, Policy::pct);
    const auto& order = r.trace.device_order[0];
    // Whenever a vertex starts, no vertex that was already ready has higher pct.
    for (std::size_t i = 0; i < order.size(); ++i) {
      const double now = r.trace.vertices[order[i]].start;
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        double ready = 0.0;
        for (EdgeId e : g.in_edges(order[j])) ready = std::max(ready, r.trace.transfers[e].end);
        if (ready <= now) CHECK(pct[order[j]] <= pct[order[i]]);
      }
    }
  }
}
