#ifndef GRAPHNLS_FAMILIES_HPP
#define GRAPHNLS_FAMILIES_HPP

#include <string>
#include <vector>

#include "graphnls/metric_graph.hpp"

namespace graphnls {

enum class FamilyTag {
  kLineWithPendant,
  kSignpost,
  kTadpole,
  kFork,
  kTowerOfBubbles,
  kGammaNL,
  kRegularTree,
  kPeriodicChain,
  kInterval,
  kHalfLine,
  kLine,
  kGeneric,
};

inline const char* to_string(FamilyTag t) {
  switch (t) {
    case FamilyTag::kLineWithPendant: return "LINE_WITH_PENDANT";
    case FamilyTag::kSignpost: return "SIGNPOST";
    case FamilyTag::kTadpole: return "TADPOLE";
    case FamilyTag::kFork: return "FORK";
    case FamilyTag::kTowerOfBubbles: return "TOWER_OF_BUBBLES";
    case FamilyTag::kGammaNL: return "GAMMA_NL";
    case FamilyTag::kRegularTree: return "REGULAR_TREE";
    case FamilyTag::kPeriodicChain: return "PERIODIC_CHAIN";
    case FamilyTag::kInterval: return "INTERVAL";
    case FamilyTag::kHalfLine: return "HALFLINE";
    case FamilyTag::kLine: return "LINE";
    case FamilyTag::kGeneric: return "GENERIC";
  }
  return "GENERIC";
}

/// Parameters for the built-in graph families. Only the fields relevant to
/// the chosen tag are read.
struct FamilySpec {
  FamilyTag tag = FamilyTag::kInterval;

  double length = 1.0;        // INTERVAL length, TADPOLE circle, FORK prongs
  double pendant_a = 1.0;     // first pendant (LINE_WITH_PENDANT, SIGNPOST
                              // post, GAMMA_NL, PERIODIC_CHAIN tooth)
  double pendant_b = 1.0;     // second pendant (GAMMA_NL)
  double loop_length = 1.0;   // SIGNPOST loop, PERIODIC_CHAIN per-cell loop
  int count = 1;              // GAMMA_NL parallel edges N, FORK prongs,
                              // PERIODIC_CHAIN cells K
  double glue_length = 1.0;   // GAMMA_NL connecting length L
  std::vector<double> bubble_lengths;  // TOWER_OF_BUBBLES half-circumferences

  // REGULAR_TREE
  int tree_degree = 3;
  int tree_depth = 4;
  double tree_edge_length = 1.0;
  bool rooted = false;
  bool root_dirichlet = false;

  // Boundary flags
  bool dirichlet_a = false;  // INTERVAL left end, HALFLINE origin
  bool dirichlet_b = false;  // INTERVAL right end

  // PERIODIC_CHAIN: cell = link of `length` + pendant of `pendant_a` (0 to
  // omit) + loop of `loop_length` (0 to omit); truncated with Dirichlet ends.
  bool pendant_dirichlet = false;  // put the per-cell pendant tips in Z
};

namespace family {

inline MetricGraph interval(double length, bool dir_a = false,
                            bool dir_b = false) {
  MetricGraphBuilder b;
  VertexId va = b.add_vertex(false, dir_a);
  VertexId vb = b.add_vertex(false, dir_b);
  b.add_edge(va, vb, length);
  return b.build();
}

inline MetricGraph half_line(bool dirichlet_origin = false) {
  MetricGraphBuilder b;
  VertexId o = b.add_vertex(false, dirichlet_origin);
  b.add_half_line(o);
  return b.build();
}

/// The real line as two half-lines glued at the origin.
inline MetricGraph line() {
  MetricGraphBuilder b;
  VertexId o = b.add_vertex();
  b.add_half_line(o);
  b.add_half_line(o);
  return b.build();
}

inline MetricGraph tadpole(double circle_length) {
  MetricGraphBuilder b;
  VertexId v = b.add_vertex();
  b.add_edge(v, v, circle_length);
  b.add_half_line(v);
  return b.build();
}

inline MetricGraph line_with_pendant(double pendant_length) {
  MetricGraphBuilder b;
  VertexId o = b.add_vertex();
  VertexId tip = b.add_vertex();
  b.add_edge(o, tip, pendant_length);
  b.add_half_line(o);
  b.add_half_line(o);
  return b.build();
}

/// Line with a post carrying a loop on top.
inline MetricGraph signpost(double post_length, double loop_length) {
  MetricGraphBuilder b;
  VertexId o = b.add_vertex();
  VertexId top = b.add_vertex();
  b.add_edge(o, top, post_length);
  b.add_edge(top, top, loop_length);
  b.add_half_line(o);
  b.add_half_line(o);
  return b.build();
}

/// One half-line with `prongs` pendants at its finite vertex.
inline MetricGraph fork(int prongs, double prong_length) {
  if (prongs < 1) throw GraphError("fork: need at least one prong");
  MetricGraphBuilder b;
  VertexId o = b.add_vertex();
  for (int i = 0; i < prongs; ++i) {
    VertexId tip = b.add_vertex();
    b.add_edge(o, tip, prong_length);
  }
  b.add_half_line(o);
  return b.build();
}

/// A line plus a chain of pairwise tangent circles. Bubble i has
/// circumference 2*half_lengths[i]; all but the topmost are realized as two
/// parallel edges between consecutive tangency vertices, the topmost as a
/// loop.
inline MetricGraph tower_of_bubbles(const std::vector<double>& half_lengths) {
  if (half_lengths.empty())
    throw GraphError("tower_of_bubbles: need at least one bubble");
  MetricGraphBuilder b;
  VertexId base = b.add_vertex();
  b.add_half_line(base);
  b.add_half_line(base);
  VertexId below = base;
  for (std::size_t i = 0; i + 1 < half_lengths.size(); ++i) {
    VertexId above = b.add_vertex();
    b.add_edge(below, above, half_lengths[i]);
    b.add_edge(below, above, half_lengths[i]);
    below = above;
  }
  b.add_edge(below, below, 2.0 * half_lengths.back());
  return b.build();
}

/// Two vertices joined by n parallel edges of length L, each carrying one
/// pendant and one half-line. Edge order: parallels, pendants, half-lines.
inline MetricGraph gamma_nl(int n, double L, double pendant1,
                            double pendant2) {
  if (n < 1) throw GraphError("gamma_nl: need at least one connecting edge");
  MetricGraphBuilder b;
  VertexId v1 = b.add_vertex();
  VertexId v2 = b.add_vertex();
  for (int i = 0; i < n; ++i) b.add_edge(v1, v2, L);
  VertexId t1 = b.add_vertex();
  b.add_edge(v1, t1, pendant1);
  VertexId t2 = b.add_vertex();
  b.add_edge(v2, t2, pendant2);
  b.add_half_line(v1);
  b.add_half_line(v2);
  return b.build();
}

/// Regular tree truncated at `depth` generations; truncation leaves carry
/// Dirichlet conditions standing in for the removed infinite part. A rooted
/// tree starts from a degree-1 root (optionally in Z), an unrooted one from
/// a central vertex of full degree.
inline MetricGraph regular_tree(int degree, int depth, double edge_length,
                                bool rooted, bool root_dirichlet) {
  if (degree < 3) throw GraphError("regular_tree: degree must be >= 3");
  if (depth < 1) throw GraphError("regular_tree: depth must be >= 1");
  if (root_dirichlet && !rooted)
    throw GraphError("regular_tree: only a rooted tree has a Dirichlet root");
  MetricGraphBuilder b;
  VertexId root = b.add_vertex(false, root_dirichlet);
  std::vector<VertexId> frontier{root};
  for (int level = 0; level < depth; ++level) {
    std::vector<VertexId> next;
    for (VertexId v : frontier) {
      int children;
      if (level == 0)
        children = rooted ? 1 : degree;
      else
        children = degree - 1;
      for (int c = 0; c < children; ++c) {
        bool leaf = (level + 1 == depth);
        VertexId w = b.add_vertex(false, /*dirichlet=*/leaf);
        b.add_edge(v, w, edge_length);
        if (!leaf) next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return b.build();
}

/// K-cell truncation of a Z-periodic chain. Cell = link edge + optional
/// pendant tooth + optional loop at the junction; the two chain ends carry
/// half link edges pinned by Dirichlet vertices.
inline MetricGraph periodic_chain(int cells, double cell_length,
                                  double pendant_length, double loop_length,
                                  bool pendant_dirichlet = false) {
  if (cells < 1) throw GraphError("periodic_chain: need at least one cell");
  if (pendant_length <= 0.0 && loop_length <= 0.0)
    throw GraphError("periodic_chain: cell needs a pendant or a loop");
  MetricGraphBuilder b;
  VertexId left = b.add_vertex(false, /*dirichlet=*/true);
  std::vector<VertexId> junctions(static_cast<std::size_t>(cells));
  for (int k = 0; k < cells; ++k) junctions[static_cast<std::size_t>(k)] = b.add_vertex();
  VertexId right = b.add_vertex(false, /*dirichlet=*/true);
  b.add_edge(left, junctions.front(), cell_length / 2.0);
  for (int k = 0; k + 1 < cells; ++k)
    b.add_edge(junctions[static_cast<std::size_t>(k)],
               junctions[static_cast<std::size_t>(k + 1)], cell_length);
  b.add_edge(junctions.back(), right, cell_length / 2.0);
  for (int k = 0; k < cells; ++k) {
    VertexId j = junctions[static_cast<std::size_t>(k)];
    if (pendant_length > 0.0) {
      VertexId tip = b.add_vertex(false, pendant_dirichlet);
      b.add_edge(j, tip, pendant_length);
    }
    if (loop_length > 0.0) b.add_edge(j, j, loop_length);
  }
  return b.build();
}

}  // namespace family

/// Deterministic dispatch over FamilySpec; identical specs produce identical
/// vertex/edge numbering.
inline MetricGraph build_graph(const FamilySpec& spec) {
  switch (spec.tag) {
    case FamilyTag::kInterval:
      return family::interval(spec.length, spec.dirichlet_a, spec.dirichlet_b);
    case FamilyTag::kHalfLine:
      return family::half_line(spec.dirichlet_a);
    case FamilyTag::kLine:
      return family::line();
    case FamilyTag::kTadpole:
      return family::tadpole(spec.length);
    case FamilyTag::kLineWithPendant:
      return family::line_with_pendant(spec.pendant_a);
    case FamilyTag::kSignpost:
      return family::signpost(spec.pendant_a, spec.loop_length);
    case FamilyTag::kFork:
      return family::fork(spec.count, spec.length);
    case FamilyTag::kTowerOfBubbles:
      return family::tower_of_bubbles(spec.bubble_lengths);
    case FamilyTag::kGammaNL:
      return family::gamma_nl(spec.count, spec.glue_length, spec.pendant_a,
                              spec.pendant_b);
    case FamilyTag::kRegularTree:
      return family::regular_tree(spec.tree_degree, spec.tree_depth,
                                  spec.tree_edge_length, spec.rooted,
                                  spec.root_dirichlet);
    case FamilyTag::kPeriodicChain:
      return family::periodic_chain(spec.count, spec.length, spec.pendant_a,
                                    spec.loop_length, spec.pendant_dirichlet);
    case FamilyTag::kGeneric:
      break;
  }
  throw GraphError("build_graph: GENERIC is not a constructible family");
}

}  // namespace graphnls

#endif  // GRAPHNLS_FAMILIES_HPP
