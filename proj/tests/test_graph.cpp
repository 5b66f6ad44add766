#include <doctest.h>

#include <random>

#include "flowpart/error.hpp"
#include "flowpart/graph.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace flowpart;
using fixtures::E;

TEST_CASE("validate_dag accepts a chain") {
  CHECK(validate_dag(fixtures::chain({1, 1, 1})).empty());
}

TEST_CASE("validate_dag names the smallest cycle") {
  const auto g = fixtures::graph_of({1, 1}, {{0, 1}, {1, 0}});
  const auto violations = validate_dag(g);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == ViolationKind::cycle);
  CHECK(violations[0].message == "cycle {v1,v2}");
  CHECK_FALSE(g.is_acyclic());
  CHECK_THROWS_AS(g.topological_order(), Error);
}

TEST_CASE("validate_dag reports unknown endpoints") {
  const auto g = fixtures::graph_of({1}, {{0, 7}});
  const auto violations = validate_dag(g);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == ViolationKind::unknown_endpoint);
  CHECK(violations[0].message.find("unknown endpoint") != std::string::npos);
}

TEST_CASE("validate_dag reports structural defects") {
  SUBCASE("self loop") { CHECK(contains(validate_dag(fixtures::graph_of({1}, {{0, 0}})), ViolationKind::self_loop)); }
  SUBCASE("duplicate edge") {
    CHECK(contains(validate_dag(fixtures::graph_of({1, 1}, {{0, 1}, {0, 1}})), ViolationKind::duplicate_edge));
  }
  SUBCASE("negative cost") { CHECK(contains(validate_dag(fixtures::graph_of({-1}, {})), ViolationKind::negative_cost)); }
  SUBCASE("negative volume") {
    CHECK(contains(validate_dag(fixtures::graph_of({1, 1}, {{0, 1, -2}})), ViolationKind::negative_volume));
  }
  SUBCASE("duplicate id") {
    DataflowGraph g({{"a", 1}, {"a", 2}}, {});
    CHECK(contains(validate_dag(g), ViolationKind::duplicate_vertex));
  }
}

TEST_CASE("add_virtual_sink joins every sink") {
  SUBCASE("two disconnected sinks") {
    const auto g = fixtures::graph_of({1, 2}, {});
    const auto s = add_virtual_sink(g);
    REQUIRE(s.num_vertices() == 3);
    CHECK(s.vertex(2).cost == 0.0);
    REQUIRE(s.num_edges() == 2);
    for (const auto& e : s.edges()) {
      CHECK(e.dst == 2);
      CHECK(e.volume == 0.0);
    }
    CHECK(g.num_vertices() == 2);
  }
  SUBCASE("single sink") {
    const auto s = add_virtual_sink(fixtures::diamond());
    CHECK(s.num_vertices() == 5);
    CHECK(s.num_edges() == 5);
    CHECK(s.is_sink(4));
    CHECK_FALSE(s.is_sink(3));
  }
  SUBCASE("single vertex") {
    const auto s = add_virtual_sink(fixtures::graph_of({4}, {}));
    CHECK(s.num_vertices() == 2);
    CHECK(s.num_edges() == 1);
  }
  SUBCASE("empty graph") { CHECK_THROWS_AS(add_virtual_sink(DataflowGraph{}), Error); }
}

TEST_CASE("ranks on the diamond") {
  const auto g = fixtures::diamond();
  const auto r = total_rank(g);
  CHECK(r.up == std::vector<double>{7, 4, 5, 1});
  CHECK(r.down == std::vector<double>{2, 5, 6, 7});
  CHECK(r.total == std::vector<double>{9, 9, 11, 8});
  CHECK(up_rank(g) == r.up);
  CHECK(down_rank(g) == r.down);
}

TEST_CASE("ranks on trivial graphs") {
  const auto single = total_rank(fixtures::graph_of({5}, {}));
  CHECK(single.up[0] == 5);
  CHECK(single.down[0] == 5);
  CHECK(single.total[0] == 10);

  const auto c = total_rank(fixtures::chain({2, 3}));
  CHECK(c.up == std::vector<double>{5, 3});
  CHECK(c.down == std::vector<double>{2, 5});
  CHECK(c.total == std::vector<double>{7, 8});
}

TEST_CASE("ranks reject cycles") {
  const auto g = fixtures::graph_of({1, 1}, {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(up_rank(g), Error);
  CHECK_THROWS_AS(down_rank(g), Error);
}

TEST_CASE("critical path examples") {
  const auto d = fixtures::diamond();
  CHECK(critical_path(d) == std::vector<VertexId>{0, 2, 3});
  CHECK(path_cost(d, critical_path(d)) == 7);

  CHECK(critical_path(fixtures::chain({1, 2, 3})) == std::vector<VertexId>{0, 1, 2});

  // s -> a(10) -> t and s -> b(9) -> t
  const auto parallel = fixtures::graph_of({1, 10, 9, 1}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(critical_path(parallel) == std::vector<VertexId>{0, 1, 3});

  CHECK_THROWS_AS(critical_path(DataflowGraph{}), Error);
}

TEST_CASE("critical path ties follow the smallest id") {
  const auto g = fixtures::graph_of({1, 3, 3, 1}, {{0, 2}, {0, 1}, {2, 3}, {1, 3}});
  CHECK(critical_path(g) == std::vector<VertexId>{0, 1, 3});
}

TEST_CASE("rank properties on random DAGs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const auto g = fixtures::random_dag(rng, n, 0.35);
    const auto r = total_rank(g);
    CAPTURE(trial);

    for (const auto& e : g.edges()) {
      CHECK(r.up[e.src] >= r.up[e.dst] + g.vertex(e.src).cost);
      CHECK(r.down[e.dst] >= r.down[e.src] + g.vertex(e.dst).cost);
    }
    for (VertexId v = 0; v < n; ++v) {
      CHECK(r.total[v] == r.up[v] + r.down[v]);
      CHECK(r.up[v] >= g.vertex(v).cost);
      CHECK(r.down[v] >= g.vertex(v).cost);
    }

    double max_sink_down = 0.0, max_source_up = 0.0;
    for (VertexId v = 0; v < n; ++v) {
      if (g.is_sink(v)) max_sink_down = std::max(max_sink_down, r.down[v]);
      if (g.is_source(v)) max_source_up = std::max(max_source_up, r.up[v]);
    }
    const auto path = critical_path(g);
    CHECK(max_sink_down == max_source_up);
    CHECK(path_cost(g, path) == max_sink_down);

    REQUIRE_FALSE(path.empty());
    CHECK(g.is_source(path.front()));
    CHECK(g.is_sink(path.back()));
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      bool edge = false;
      for (EdgeId e : g.out_edges(path[i])) edge |= g.edge(e).dst == path[i + 1];
      CHECK(edge);
    }

    const auto with_sink = add_virtual_sink(g);
    const auto up_after = up_rank(with_sink);
    for (VertexId v = 0; v < n; ++v) CHECK(up_after[v] == r.up[v]);
  }
}

TEST_CASE("ranks match path enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const auto g = fixtures::random_dag(rng, n, 0.4);
    CAPTURE(trial);
    CHECK(up_rank(g) == oracles::up_by_paths(g));
    CHECK(down_rank(g) == oracles::down_by_paths(g));
    CHECK(path_cost(g, critical_path(g)) == oracles::longest_path_cost(g));
  }
}

TEST_CASE("topological order respects every edge") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_dag(rng, 12, 0.3);
    const auto& order = g.topological_order();
    std::vector<std::size_t> position(g.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
    for (const auto& e : g.edges()) CHECK(position[e.src] < position[e.dst]);
  }
}
