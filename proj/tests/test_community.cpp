#include <doctest.h>

#include <sstream>

#include "kgwalk/community.hpp"
#include "support.hpp"

using namespace kgwalk;

namespace {

UndirectedGraph from_edges(std::size_t n, std::vector<std::tuple<VertexId, VertexId, double>> edges) {
  return UndirectedGraph(n, edges);
}

// two 3-cliques, optionally bridged by one edge
UndirectedGraph two_cliques(bool bridged) {
  std::vector<std::tuple<VertexId, VertexId, double>> edges{
      {0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}};
  if (bridged) edges.push_back({2, 3, 1});
  return from_edges(6, edges);
}

}  // namespace

TEST_CASE("modularity closed forms") {
  auto g = two_cliques(false);

  SUBCASE("everything in one community scores zero") {
    auto partition = CommunityPartition::from_assignment({0, 0, 0, 0, 0, 0});
    CHECK(modularity(g, partition, 1.0) == doctest::Approx(0.0));
  }
  SUBCASE("the clique split scores exactly one half") {
    auto partition = CommunityPartition::from_assignment({0, 0, 0, 1, 1, 1});
    CHECK(modularity(g, partition, 1.0) == doctest::Approx(0.5));
  }
  SUBCASE("singletons on an edgeless graph score zero") {
    auto empty = from_edges(4, {});
    auto partition = CommunityPartition::from_assignment({0, 1, 2, 3});
    CHECK(modularity(empty, partition, 1.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("louvain separates two bridged cliques") {
  auto g = two_cliques(true);
  auto partition = louvain(g, 1.0, 42);
  REQUIRE(partition.community_count() == 2);
  CHECK(partition.community_of(0) == partition.community_of(1));
  CHECK(partition.community_of(0) == partition.community_of(2));
  CHECK(partition.community_of(3) == partition.community_of(4));
  CHECK(partition.community_of(3) == partition.community_of(5));
  CHECK(partition.community_of(0) != partition.community_of(3));

  double best = kgwalk::testing::brute_force_best_modularity(g, 1.0);
  CHECK(modularity(g, partition, 1.0) == doctest::Approx(best));
}

TEST_CASE("edgeless graphs decompose into singletons") {
  auto empty = from_edges(5, {});
  auto partition = louvain(empty, 1.0, 1);
  CHECK(partition.community_count() == 5);
}

TEST_CASE("louvain never loses much to the brute-force optimum on small graphs") {
  Rng rng(2024);
  for (int round = 0; round < 20; ++round) {
    std::size_t n = 3 + rng.index(6);  // 3..8 vertices
    std::vector<std::tuple<VertexId, VertexId, double>> edges;
    for (VertexId a = 0; a < n; ++a) {
      for (VertexId b = a + 1; b < n; ++b) {
        if (rng.uniform() < 0.45) edges.emplace_back(a, b, 1.0);
      }
    }
    auto g = from_edges(n, edges);
    auto partition = louvain(g, 1.0, round);
    double q = modularity(g, partition, 1.0);
    double best = kgwalk::testing::brute_force_best_modularity(g, 1.0);
    if (best > 0) {
      CHECK(q >= 0.95 * best);
    } else {
      CHECK(q >= best - 1e-12);
    }
  }
}

TEST_CASE("local moving never decreases modularity vs singletons") {
  Rng rng(555);
  for (int round = 0; round < 10; ++round) {
    std::size_t n = 4 + rng.index(5);
    std::vector<std::tuple<VertexId, VertexId, double>> edges;
    for (VertexId a = 0; a < n; ++a) {
      for (VertexId b = a + 1; b < n; ++b) {
        if (rng.uniform() < 0.5) edges.emplace_back(a, b, 1.0);
      }
    }
    auto g = from_edges(n, edges);
    std::vector<std::uint32_t> singleton(n);
    for (std::size_t i = 0; i < n; ++i) singleton[i] = static_cast<std::uint32_t>(i);
    double base = modularity(g, CommunityPartition::from_assignment(singleton), 1.0);
    double q = modularity(g, louvain(g, 1.0, round), 1.0);
    CHECK(q >= base - 1e-12);
  }
}

TEST_CASE("louvain is deterministic for a fixed seed") {
  Rng rng(9);
  auto g = build_graph(kgwalk::testing::random_triples(rng, 15, 4, 50));
  auto p1 = louvain(g, 1.0, 123);
  auto p2 = louvain(g, 1.0, 123);
  REQUIRE(p1.vertex_count() == p2.vertex_count());
  for (VertexId v = 0; v < p1.vertex_count(); ++v) {
    CHECK(p1.community_of(v) == p2.community_of(v));
  }
}

TEST_CASE("partition covers the whole expanded graph and stays consistent") {
  Rng rng(10);
  auto g = build_graph(kgwalk::testing::random_triples(rng, 10, 3, 30));
  auto partition = louvain(g, 1.0, 4);
  CHECK(partition.vertex_count() == g.vertex_count());
  // assignment and member lists agree
  for (std::uint32_t c = 0; c < partition.community_count(); ++c) {
    for (VertexId v : partition.members(c)) CHECK(partition.community_of(v) == c);
  }
  std::size_t total = 0;
  for (std::uint32_t c = 0; c < partition.community_count(); ++c) {
    total += partition.members(c).size();
  }
  CHECK(total == g.vertex_count());
}

TEST_CASE("parallel edges in the projection accumulate weight") {
  // (a, p, a) projects to a double-weight edge between a and the predicate
  auto g = build_graph(std::vector<Triple>{kgwalk::testing::t("a", "p", "a")});
  auto proj = UndirectedGraph::project(g);
  CHECK(proj.total_weight() == doctest::Approx(2.0));
  CHECK(proj.neighbours(0).size() == 1);
  CHECK(proj.neighbours(0)[0].second == doctest::Approx(2.0));
}

TEST_CASE("partition TSV round trip") {
  Rng rng(11);
  auto g = build_graph(kgwalk::testing::random_triples(rng, 8, 3, 20));
  auto partition = louvain(g, 1.0, 2);
  std::ostringstream out;
  write_partition(g, partition, out);
  std::istringstream in(out.str());
  auto loaded = read_partition(g, in, 1.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    CHECK(loaded.community_of(v) == partition.community_of(v));
  }

  std::istringstream truncated("onlyoneline\t0\n");
  CHECK_THROWS_AS(read_partition(g, truncated, 1.0), Error);
}
