#include <doctest.h>

#include <sstream>

#include "voter/errors.hpp"
#include "voter/graph.hpp"

using namespace voter;

TEST_SUITE("graph") {
  TEST_CASE("line neighborhoods") {
    const Graph g = make_line(4);
    CHECK(g.node_count() == 5);
    CHECK(g.in_degree(0) == 1);
    CHECK(g.has_edge(0, 0));
    for (NodeId i = 1; i <= 4; ++i) {
      CHECK(g.in_degree(i) == 2);
      CHECK(g.has_edge(i - 1, i));
      CHECK(g.has_edge(i, i));
    }
    CHECK_FALSE(g.has_edge(2, 1));
    CHECK(is_controlled_line(g));
    CHECK_FALSE(is_controlled_line(make_line(4, false)));
    const Graph bare = make_line(3, false);
    CHECK(bare.in_degree(2) == 1);
    CHECK(bare.has_edge(1, 2));
  }

  TEST_CASE("constructor validates input") {
    CHECK_THROWS_AS(Graph(2, {{0}, {}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(2, {{0}, {5}}), InvalidArgument);
    const Graph g(2, {{1, 1, 0}, {0}});
    CHECK(g.in_degree(0) == 2);
  }

  TEST_CASE("scale-free graph is symmetric, seeded and heavy-tailed") {
    const Graph g = make_scale_free(200, 1, 7);
    CHECK(g.node_count() == 200);
    CHECK(g == make_scale_free(200, 1, 7));
    CHECK_FALSE(g == make_scale_free(200, 1, 8));
    std::size_t max_degree = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      CHECK(g.in_degree(i) >= 1);
      for (NodeId j : g.in_neighbors(i)) CHECK(g.has_edge(i, j));
      max_degree = std::max(max_degree, g.undirected_degree(i));
    }
    CHECK(max_degree >= 10);
    const Graph g2 = make_scale_free(50, 2, 3);
    CHECK(g2.node_count() == 50);
  }

  TEST_CASE("edge list round trip") {
    const Graph g = make_scale_free(30, 2, 11);
    std::stringstream ss;
    write_edge_list(ss, g);
    CHECK(read_edge_list(ss) == g);
    std::stringstream labelled("# nodes=2\n# label 0 hub\n# label 1 leaf\n0 0\n0 1\n1 1\n");
    const Graph h = read_edge_list(labelled);
    CHECK(h.has_labels());
    CHECK(h.label(0) == "hub");
    CHECK(h.has_edge(0, 1));
    std::stringstream bad("# nodes=2\n0 3\n");
    CHECK_THROWS_AS(read_edge_list(bad), InvalidArgument);
  }
}
