#ifndef GRAPHNLS_FIXTURES_HPP
#define GRAPHNLS_FIXTURES_HPP

#include "graphnls/metric_graph.hpp"

namespace graphnls {
namespace fixtures {

/// Complete graph on four vertices with a degree-2 vertex on one edge and
/// two half-lines; no Dirichlet set. Removing any edge leaves at-infinity
/// vertices in every component, so no edge makes a compact side.
inline MetricGraph core_with_two_half_lines() {
  MetricGraphBuilder b;
  for (int i = 0; i < 4; ++i) b.add_vertex();
  VertexId mid = b.add_vertex();  // degree-2 vertex inside edge {1,2}
  b.add_edge(0, 1, 1.0);
  b.add_edge(0, 2, 1.0);
  b.add_edge(0, 3, 1.0);
  b.add_edge(1, mid, 0.5);
  b.add_edge(mid, 2, 0.5);
  b.add_edge(1, 3, 1.0);
  b.add_edge(2, 3, 1.0);
  b.add_half_line(0);
  b.add_half_line(1);
  return b.build();
}

/// A line carrying a stem of two tangent circles: both connector edges leave
/// a compact component behind when removed.
inline MetricGraph bubble_stack_on_line(double loop_top = 2.0,
                                        double bubble_half = 1.5,
                                        double connector = 0.5) {
  MetricGraphBuilder b;
  VertexId on_line = b.add_vertex();
  VertexId bubble_lo = b.add_vertex();
  VertexId bubble_hi = b.add_vertex();
  VertexId loop_base = b.add_vertex();
  b.add_half_line(on_line);
  b.add_half_line(on_line);
  b.add_edge(on_line, bubble_lo, connector);
  b.add_edge(bubble_lo, bubble_hi, bubble_half);
  b.add_edge(bubble_lo, bubble_hi, bubble_half);
  b.add_edge(bubble_hi, loop_base, connector);
  b.add_edge(loop_base, loop_base, loop_top);
  return b.build();
}

/// A line with terminal edges of lengths 1, 2, ..., k attached at unit
/// spacing. The longest pendants host near-half-soliton competitors, so the
/// measured ground level approaches half the soliton level from above.
inline MetricGraph line_with_growing_pendants(int k_max) {
  if (k_max < 1) throw GraphError("need at least one pendant");
  MetricGraphBuilder b;
  std::vector<VertexId> spine;
  for (int k = 0; k < k_max; ++k) spine.push_back(b.add_vertex());
  b.add_half_line(spine.front());
  for (int k = 0; k + 1 < k_max; ++k)
    b.add_edge(spine[static_cast<std::size_t>(k)],
               spine[static_cast<std::size_t>(k + 1)], 1.0);
  b.add_half_line(spine.back());
  for (int k = 0; k < k_max; ++k) {
    VertexId tip = b.add_vertex();
    b.add_edge(spine[static_cast<std::size_t>(k)], tip,
               static_cast<double>(k + 1));
  }
  return b.build();
}

/// Joins two graphs by a bridge: the chosen half-line of each graph is split
/// at arc length L into a finite lead-in, a junction vertex, and a fresh
/// half-line; the two junctions are connected by an edge of length
/// bridge_length. Vertex/edge ids of g1 come first, then g2's.
inline MetricGraph glue_on_half_lines(const MetricGraph& g1, EdgeId h1,
                                      const MetricGraph& g2, EdgeId h2,
                                      double L, double bridge_length = 1.0) {
  if (!g1.edge(h1).is_half_line() || !g2.edge(h2).is_half_line())
    throw GraphError("glue_on_half_lines: both edges must be half-lines");
  MetricGraphBuilder b;
  auto copy_graph = [&](const MetricGraph& g, EdgeId h, VertexId& junction) {
    int v_off = 0;
    std::vector<VertexId> map(static_cast<std::size_t>(g.num_vertices()));
    for (const Vertex& v : g.vertices())
      map[static_cast<std::size_t>(v.id)] =
          b.add_vertex(v.at_infinity, v.dirichlet);
    (void)v_off;
    for (const Edge& e : g.edges()) {
      if (e.id == h) {
        junction = b.add_vertex();
        b.add_edge(map[static_cast<std::size_t>(e.a)], junction, L);
        // The old at-infinity vertex now terminates the fresh half-line.
        b.add_edge(junction, map[static_cast<std::size_t>(e.b)], kHalfLine);
      } else {
        b.add_edge(map[static_cast<std::size_t>(e.a)],
                   map[static_cast<std::size_t>(e.b)], e.length);
      }
    }
  };
  VertexId j1 = -1, j2 = -1;
  copy_graph(g1, h1, j1);
  copy_graph(g2, h2, j2);
  b.add_edge(j1, j2, bridge_length);
  return b.build();
}

}  // namespace fixtures
}  // namespace graphnls

#endif  // GRAPHNLS_FIXTURES_HPP
