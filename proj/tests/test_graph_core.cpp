#include <doctest.h>

#include <random>

#include "graphnls/families.hpp"
#include "graphnls/metric_graph.hpp"
#include "graphnls/topology.hpp"
#include "random_graphs.hpp"

using namespace graphnls;

TEST_SUITE_BEGIN("graph_core");

TEST_CASE("tadpole: one finite vertex, one at infinity, loop plus tail") {
  MetricGraph g = family::tadpole(2.0);
  int finite = 0, infinite = 0;
  for (const Vertex& v : g.vertices()) (v.at_infinity ? infinite : finite)++;
  CHECK(finite == 1);
  CHECK(infinite == 1);
  REQUIRE(g.num_edges() == 2);
  CHECK(g.edge(0).is_loop());
  CHECK(g.edge(1).is_half_line());
  CHECK(g.degree(0) == 3);  // loop counts twice
}

TEST_CASE("interval with Dirichlet ends") {
  MetricGraph g = family::interval(1.0, true, true);
  REQUIRE(g.num_vertices() == 2);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.vertex(0).dirichlet);
  CHECK(g.vertex(1).dirichlet);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
}

TEST_CASE("gamma_nl counts match the five-strand picture") {
  MetricGraph g = family::gamma_nl(5, 3.0, 2.0, 2.0);
  int finite = 0, infinite = 0;
  for (const Vertex& v : g.vertices()) (v.at_infinity ? infinite : finite)++;
  CHECK(finite == 4);
  CHECK(infinite == 2);
  CHECK(g.num_edges() == 9);  // 5 parallels + 2 pendants + 2 half-lines
  CHECK(g.degree(0) == 7);    // v1: 5 parallels + pendant + half-line
  CHECK(g.degree(1) == 7);
}

TEST_CASE("degenerate specs are rejected") {
  CHECK_THROWS_AS(family::interval(0.0), GraphError);
  CHECK_THROWS_AS(family::tadpole(-1.0), GraphError);
  CHECK_THROWS_AS(family::regular_tree(2, 4, 1.0, false, false), GraphError);
  CHECK_THROWS_AS(family::periodic_chain(0, 1.0, 1.0, 0.0), GraphError);
  CHECK_THROWS_AS(family::tower_of_bubbles({}), GraphError);
}

TEST_CASE("build_graph is deterministic") {
  FamilySpec spec;
  spec.tag = FamilyTag::kGammaNL;
  spec.count = 3;
  spec.glue_length = 4.0;
  spec.pendant_a = spec.pendant_b = 2.0;
  MetricGraph a = build_graph(spec);
  MetricGraph b = build_graph(spec);
  REQUIRE(a.num_vertices() == b.num_vertices());
  REQUIRE(a.num_edges() == b.num_edges());
  for (int e = 0; e < a.num_edges(); ++e) {
    CHECK(a.edge(e).a == b.edge(e).a);
    CHECK(a.edge(e).b == b.edge(e).b);
    CHECK(a.edge(e).length == b.edge(e).length);
  }
}

TEST_CASE("every built family keeps Z at degree-1 finite vertices") {
  std::vector<MetricGraph> graphs;
  graphs.push_back(family::interval(1.0, true, false));
  graphs.push_back(family::half_line(true));
  graphs.push_back(family::line());
  graphs.push_back(family::tadpole(4.0));
  graphs.push_back(family::line_with_pendant(2.0));
  graphs.push_back(family::signpost(1.0, 3.0));
  graphs.push_back(family::fork(3, 2.0));
  graphs.push_back(family::tower_of_bubbles({1.0, 0.5}));
  graphs.push_back(family::gamma_nl(2, 4.0, 2.0, 2.0));
  graphs.push_back(family::regular_tree(3, 3, 1.0, true, true));
  graphs.push_back(family::periodic_chain(4, 1.0, 1.0, 0.0));
  for (const MetricGraph& g : graphs) {
    CHECK(is_connected(g));
    for (const Vertex& v : g.vertices()) {
      if (v.dirichlet) {
        CHECK(g.degree(v.id) == 1);
        CHECK(!v.at_infinity);
      }
      if (v.at_infinity) CHECK(g.degree(v.id) == 1);
    }
  }
}

TEST_CASE("subdivide interval of length 2 at midpoint") {
  MetricGraph g = family::interval(2.0);
  MetricGraph h = subdivide_edge(g, 0, 1.0);
  REQUIRE(h.num_vertices() == 3);
  REQUIRE(h.num_edges() == 2);
  CHECK(h.edge(0).length == doctest::Approx(1.0));
  CHECK(h.edge(1).length == doctest::Approx(1.0));
  CHECK(h.degree(2) == 2);  // the new vertex
  CHECK(h.total_finite_length() == doctest::Approx(g.total_finite_length()));
}

TEST_CASE("subdividing a loop yields two parallel edges") {
  MetricGraphBuilder b;
  VertexId v = b.add_vertex();
  b.add_edge(v, v, 2.0);
  b.add_half_line(v);
  MetricGraph g = b.build();
  MetricGraph h = subdivide_edge(g, 0, 1.0);
  // Both non-half-line edges now join the original vertex and the new one.
  int parallels = 0;
  for (const Edge& e : h.edges()) {
    if (e.is_half_line()) continue;
    CHECK(!e.is_loop());
    bool joins = (e.a == 0 && e.b == h.num_vertices() - 1) ||
                 (e.b == 0 && e.a == h.num_vertices() - 1);
    CHECK(joins);
    ++parallels;
  }
  CHECK(parallels == 2);
  CHECK(h.total_finite_length() == doctest::Approx(2.0));
}

TEST_CASE("subdivide rejects bad positions and half-lines") {
  MetricGraph g = family::tadpole(2.0);
  CHECK_THROWS_AS(subdivide_edge(g, 0, 0.0), GraphError);
  CHECK_THROWS_AS(subdivide_edge(g, 0, 2.0), GraphError);
  CHECK_THROWS_AS(subdivide_edge(g, 1, 1.0), GraphError);  // the tail
}

TEST_CASE("attach_half_line grows degree and preserves prior structure") {
  MetricGraph g = family::tadpole(2.0);
  CHECK(g.degree(0) == 3);
  MetricGraph h = attach_half_line(g, 0);
  CHECK(h.degree(0) == 4);
  CHECK(h.num_edges() == g.num_edges() + 1);
  CHECK(h.total_finite_length() == doctest::Approx(g.total_finite_length()));
  CHECK(is_connected(h));

  MetricGraph i0 = family::interval(1.0);
  MetricGraph hp = attach_half_line(i0, 0);
  CHECK(hp.has_half_line());
  CHECK(hp.degree(0) == 2);
  CHECK(hp.degree(1) == 1);  // the pendant tip
}

TEST_CASE("attach_half_line rejects infinity and Dirichlet vertices") {
  MetricGraph g = family::half_line(false);
  CHECK_THROWS_AS(attach_half_line(g, 1), GraphError);  // at infinity
  MetricGraph d = family::interval(1.0, true, false);
  CHECK_THROWS_AS(attach_half_line(d, 0), GraphError);  // Dirichlet
}

TEST_CASE("subdivision and attachment preserve connectivity on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    MetricGraph g = graphnls_tests::random_graph(rng);
    for (const Edge& e : g.edges()) {
      if (e.is_half_line()) continue;
      MetricGraph h = subdivide_edge(g, e.id, 0.5 * e.length);
      CHECK(is_connected(h));
      CHECK(h.total_finite_length() ==
            doctest::Approx(g.total_finite_length()));
      break;
    }
    for (const Vertex& v : g.vertices()) {
      if (v.at_infinity || v.dirichlet) continue;
      CHECK(is_connected(attach_half_line(g, v.id)));
      break;
    }
  }
}

TEST_SUITE_END();
