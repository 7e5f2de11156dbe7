#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "graphnls/families.hpp"
#include "graphnls/fixtures.hpp"
#include "graphnls/topology.hpp"
#include "random_graphs.hpp"

using namespace graphnls;

TEST_SUITE_BEGIN("topology");

TEST_CASE("connectivity basics") {
  CHECK(is_connected(family::interval(1.0)));
  CHECK(is_connected(family::gamma_nl(5, 3.0, 2.0, 2.0)));

  // Two disjoint intervals can only be produced unchecked.
  MetricGraphBuilder b;
  b.add_vertex();
  b.add_vertex();
  b.add_vertex();
  b.add_vertex();
  b.add_edge(0, 1, 1.0);
  b.add_edge(2, 3, 1.0);
  MetricGraph g = b.build_unchecked();
  CHECK(!is_connected(g));
  CHECK_THROWS_AS(MetricGraphBuilder::validate(g), GraphError);
}

TEST_CASE("F: clique core with two half-lines has none") {
  MetricGraph g = fixtures::core_with_two_half_lines();
  CHECK(compute_F(g).empty());
  CHECK(analyze_topology(g).H0);
}

TEST_CASE("F: tadpole tail is the only member") {
  MetricGraph g = family::tadpole(2.0);
  auto F = compute_F(g);
  REQUIRE(F.size() == 1);
  CHECK(g.edge(F[0]).is_half_line());
  auto decomp = decompose_F(g, F);
  REQUIRE(decomp.size() == 1);
  // The compact side is the loop vertex alone.
  CHECK(decomp[0].compact_side == std::vector<VertexId>{0});
}

TEST_CASE("F: stacked bubbles over a line give exactly the two connectors") {
  MetricGraph g = fixtures::bubble_stack_on_line();
  auto F = compute_F(g);
  CHECK(F.size() == 2);
  for (EdgeId e : F) {
    CHECK(!g.edge(e).is_loop());
    CHECK(!g.edge(e).is_half_line());
    CHECK(g.edge(e).length == doctest::Approx(0.5));  // the connectors
  }
}

TEST_CASE("F agrees with the brute-force oracle on random graphs") {
  std::mt19937_64 rng(20230817);
  for (int trial = 0; trial < 200; ++trial) {
    MetricGraph g = graphnls_tests::random_graph(rng);
    REQUIRE(g.num_edges() <= 12);
    auto fast = compute_F(g);
    auto slow = compute_F_bruteforce(g);
    CHECK(fast == slow);
    for (EdgeId e : fast) CHECK(!g.edge(e).is_loop());
  }
}

TEST_CASE("attaching a half-line inside the compact side clears F") {
  std::mt19937_64 rng(99);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 20; ++trial) {
    MetricGraph g = graphnls_tests::random_graph(rng, /*min_half_lines=*/1);
    auto F = compute_F(g);
    if (F.size() != 1) continue;
    ++found;
    auto decomp = decompose_F(g, F);
    for (VertexId v : decomp[0].compact_side) {
      if (g.vertex(v).at_infinity || g.vertex(v).dirichlet) continue;
      MetricGraph h = attach_half_line(g, v);
      CHECK(compute_F(h).empty());
    }
  }
  CHECK(found >= 10);
  // The canonical instance: a tadpole with an extra tail at the loop vertex.
  MetricGraph t = attach_half_line(family::tadpole(2.0), 0);
  CHECK(compute_F(t).empty());
}

TEST_CASE("tilde graph: no Dirichlet set means identity") {
  MetricGraph g = family::tadpole(2.0);
  MetricGraph t = build_tilde_graph(g);
  CHECK(t.num_vertices() == g.num_vertices());
  CHECK(t.num_edges() == g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e)
    CHECK(t.edge(e).is_half_line() == g.edge(e).is_half_line());
}

TEST_CASE("tilde graph: Dirichlet interval end becomes a half-line") {
  MetricGraph g = family::interval(1.0, /*dir_a=*/true, false);
  MetricGraph t = build_tilde_graph(g);
  REQUIRE(t.num_edges() == 1);
  CHECK(t.edge(0).is_half_line());
  CHECK(t.vertex(0).at_infinity);
  CHECK(!t.vertex(0).dirichlet);
  CHECK(!t.vertex(1).at_infinity);
}

TEST_CASE("tilde graph preserves the empty-F property") {
  std::mt19937_64 rng(4242);
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 20; ++trial) {
    MetricGraph g = graphnls_tests::random_graph(rng, /*min_half_lines=*/1);
    ++checked;
    MetricGraph t = build_tilde_graph(g);
    CHECK(compute_F(g).empty() == compute_F(t).empty());
  }
  CHECK(checked == 20);
}

namespace {

/// Brute-force diameter of the bounded core: discretize every bounded edge
/// and run Dijkstra over sampled points.
double diam_brute_force(const MetricGraph& g, int pts_per_edge) {
  struct Node {
    EdgeId edge;
    int idx;
  };
  // Point graph: vertices + interior sample points on bounded edges.
  std::vector<double> dist;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<int> vertex_node(static_cast<std::size_t>(g.num_vertices()), -1);
  int n = 0;
  for (const Vertex& v : g.vertices())
    if (!v.at_infinity) vertex_node[static_cast<std::size_t>(v.id)] = n++;
  std::vector<int> bounded_nodes;
  for (const Vertex& v : g.vertices())
    if (!v.at_infinity) {
      bool incident_bounded = false;
      for (const Edge& e : g.edges())
        if (!e.is_half_line() && (e.a == v.id || e.b == v.id))
          incident_bounded = true;
      if (incident_bounded)
        bounded_nodes.push_back(vertex_node[static_cast<std::size_t>(v.id)]);
    }
  adj.resize(static_cast<std::size_t>(n));
  for (const Edge& e : g.edges()) {
    if (e.is_half_line()) continue;
    double h = e.length / (pts_per_edge + 1);
    int prev = vertex_node[static_cast<std::size_t>(e.a)];
    for (int i = 0; i < pts_per_edge; ++i) {
      int cur = n++;
      adj.resize(static_cast<std::size_t>(n));
      adj[static_cast<std::size_t>(prev)].push_back({cur, h});
      adj[static_cast<std::size_t>(cur)].push_back({prev, h});
      bounded_nodes.push_back(cur);
      prev = cur;
    }
    int last = vertex_node[static_cast<std::size_t>(e.b)];
    adj[static_cast<std::size_t>(prev)].push_back({last, h});
    adj[static_cast<std::size_t>(last)].push_back({prev, h});
  }
  double best = 0.0;
  for (int src : bounded_nodes) {
    dist.assign(static_cast<std::size_t>(n),
                std::numeric_limits<double>::infinity());
    dist[static_cast<std::size_t>(src)] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0.0, src});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      for (auto [w, len] : adj[static_cast<std::size_t>(v)]) {
        if (d + len < dist[static_cast<std::size_t>(w)]) {
          dist[static_cast<std::size_t>(w)] = d + len;
          heap.push({d + len, w});
        }
      }
    }
    for (int other : bounded_nodes)
      best = std::max(best, dist[static_cast<std::size_t>(other)]);
  }
  return best;
}

}  // namespace

TEST_CASE("diameter: single pendant on a half-line") {
  MetricGraph g = family::fork(1, 2.5);
  auto d = diam_bounded_core(g);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(2.5));
}

TEST_CASE("diameter: lone loop plus tail reaches half the circumference") {
  MetricGraph g = family::tadpole(2.0);
  auto d = diam_bounded_core(g);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(1.0));
  CHECK(*d == doctest::Approx(diam_brute_force(g, 100)).epsilon(0.02));
}

TEST_CASE("diameter: two-strand graph with pendants spans tip to tip") {
  MetricGraph g = family::gamma_nl(2, 3.0, 2.0, 2.0);
  auto d = diam_bounded_core(g);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(7.0));  // 2 + 3 + 2
  CHECK(*d == doctest::Approx(diam_brute_force(g, 60)).epsilon(0.02));
}

TEST_CASE("diameter: absent without bounded edges, exact on one edge") {
  CHECK(!diam_bounded_core(family::line()).has_value());
  auto d = diam_bounded_core(family::interval(3.25));
  REQUIRE(d.has_value());
  CHECK(*d == 3.25);
}

TEST_CASE("diameter matches brute force on random graphs") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 30; ++trial) {
    MetricGraph g = graphnls_tests::random_graph(rng);
    auto d = diam_bounded_core(g);
    if (!d.has_value()) continue;
    double ref = diam_brute_force(g, 80);
    CHECK(*d >= ref - 1e-9);
    CHECK(*d <= ref + g.total_finite_length() / 40.0);
  }
}

TEST_CASE("classifier: no-compact-side graph refuses both targets") {
  MetricGraph g = fixtures::core_with_two_half_lines();
  ProblemParams params{1.0, 4.0};
  auto certs = classify(g, FamilyTag::kGeneric, params);
  REQUIRE(certs.size() == 2);
  CHECK(certs[0].target == Target::kGroundState);
  CHECK(certs[0].verdict == Verdict::kNonexistentTopological);
  CHECK(certs[1].target == Target::kNodalGroundState);
  CHECK(certs[1].verdict == Verdict::kNonexistentTopological);
}

TEST_CASE("classifier: tadpole with measured level gap") {
  MetricGraph g = family::tadpole(4.0);
  ProblemParams params{1.0, 4.0};
  double s = s_level(params);
  LevelEvidence levels;
  levels.inf_N = 0.93 * s;
  levels.err_N = 0.005 * s;
  auto certs = classify(g, FamilyTag::kTadpole, params, levels);
  CHECK(certs[0].verdict == Verdict::kExistsByLevelGap);
  CHECK(certs[0].gap == doctest::Approx(0.07 * s));
  CHECK(certs[0].gap > certs[0].error_estimate);
  // Nodal: #F = 1, so never.
  CHECK(certs[1].verdict == Verdict::kNonexistentTopological);
}

TEST_CASE("classifier: trees") {
  FamilySpec rooted;
  rooted.tag = FamilyTag::kRegularTree;
  rooted.tree_degree = 3;
  rooted.tree_depth = 4;
  rooted.rooted = true;
  rooted.root_dirichlet = true;
  MetricGraph g = build_graph(rooted);
  ProblemParams params{1.0, 4.0};
  auto certs = classify(g, rooted, params);
  CHECK(certs[0].verdict == Verdict::kNonexistentTopological);
  CHECK(certs[1].verdict == Verdict::kNonexistentTopological);

  FamilySpec unrooted = rooted;
  unrooted.rooted = false;
  unrooted.root_dirichlet = false;
  auto certs2 = classify(build_graph(unrooted), unrooted, params);
  CHECK(certs2[0].verdict == Verdict::kExistsTopological);
  CHECK(certs2[1].verdict == Verdict::kNonexistentTopological);
}

TEST_CASE("classifier: periodic chain") {
  FamilySpec chain;
  chain.tag = FamilyTag::kPeriodicChain;
  chain.count = 8;
  chain.length = 1.0;
  chain.pendant_a = 1.0;
  chain.loop_length = 0.0;
  auto certs = classify(build_graph(chain), chain, ProblemParams{1.0, 4.0});
  CHECK(certs[0].verdict == Verdict::kExistsTopological);
  CHECK(certs[1].verdict == Verdict::kNonexistentTopological);
}

TEST_CASE("classifier: line and bubble towers are the achieving exceptions") {
  ProblemParams params{1.0, 4.0};
  auto certs = classify(family::line(), FamilyTag::kLine, params);
  CHECK(certs[0].verdict == Verdict::kInconclusive);
  auto certs2 = classify(family::tower_of_bubbles({1.0, 0.5}),
                         FamilyTag::kTowerOfBubbles, params);
  CHECK(certs2[0].verdict == Verdict::kInconclusive);
  // Without the family hint the structural rule applies.
  auto certs3 = classify(family::line(), FamilyTag::kGeneric, params);
  CHECK(certs3[0].verdict == Verdict::kNonexistentTopological);
}

TEST_CASE("classifier: Dirichlet half-line refuses both targets") {
  MetricGraph g = family::half_line(/*dirichlet_origin=*/true);
  auto certs = classify(g, FamilyTag::kHalfLine, ProblemParams{1.0, 4.0});
  CHECK(certs[0].verdict == Verdict::kNonexistentTopological);  // #F = 0
  CHECK(certs[1].verdict == Verdict::kNonexistentTopological);
  CHECK(!certs[0].diam_B.has_value());  // no bounded core recorded
}

TEST_SUITE_END();
