#ifndef GRAPHNLS_METRIC_GRAPH_HPP
#define GRAPHNLS_METRIC_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphnls {

using VertexId = int;
using EdgeId = int;

/// Sentinel length marking an unbounded edge.
inline constexpr double kHalfLine = std::numeric_limits<double>::infinity();

/// Shortest admissible finite edge length.
inline constexpr double kMinEdgeLength = 1e-9;

struct Vertex {
  VertexId id = -1;
  bool at_infinity = false;
  bool dirichlet = false;  // member of Z
};

struct Edge {
  EdgeId id = -1;
  VertexId a = -1;
  VertexId b = -1;
  double length = 0.0;  // kHalfLine for unbounded edges

  bool is_half_line() const { return std::isinf(length); }
  bool is_loop() const { return a == b; }
  VertexId other(VertexId v) const { return v == a ? b : a; }
};

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable metric graph: finite edges carry a positive length, half-lines
/// end at a degree-1 vertex flagged "at infinity" (a combinatorial marker,
/// never a point of the metric space). Dirichlet vertices form the set Z.
class MetricGraph {
 public:
  MetricGraph() = default;

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(VertexId v) const {
    check_vertex(v);
    return vertices_[static_cast<std::size_t>(v)];
  }
  const Edge& edge(EdgeId e) const {
    if (e < 0 || e >= static_cast<EdgeId>(edges_.size()))
      throw GraphError("unknown edge id " + std::to_string(e));
    return edges_[static_cast<std::size_t>(e)];
  }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Number of edge endpoints incident at v; a loop contributes 2.
  int degree(VertexId v) const {
    check_vertex(v);
    int deg = 0;
    for (const Edge& e : edges_) {
      if (e.a == v) ++deg;
      if (e.b == v) ++deg;
    }
    return deg;
  }

  /// Smallest finite edge length (inf when the graph has no finite edge).
  double l_min() const { return lmin_; }

  double total_finite_length() const {
    double total = 0.0;
    for (const Edge& e : edges_)
      if (!e.is_half_line()) total += e.length;
    return total;
  }

  bool has_half_line() const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.is_half_line(); });
  }

  bool has_dirichlet() const {
    return std::any_of(vertices_.begin(), vertices_.end(),
                       [](const Vertex& v) { return v.dirichlet; });
  }

  /// Compact (no half-line). Infinite families are only handled truncated,
  /// so compactness of the data structure is just absence of half-lines.
  bool is_compact() const { return !has_half_line(); }

  /// Edge ids incident at each vertex, loops listed twice.
  std::vector<std::vector<EdgeId>> incidence() const {
    std::vector<std::vector<EdgeId>> inc(vertices_.size());
    for (const Edge& e : edges_) {
      inc[static_cast<std::size_t>(e.a)].push_back(e.id);
      if (e.b != e.a) inc[static_cast<std::size_t>(e.b)].push_back(e.id);
    }
    return inc;
  }

  friend class MetricGraphBuilder;

 private:
  void check_vertex(VertexId v) const {
    if (v < 0 || v >= static_cast<VertexId>(vertices_.size()))
      throw GraphError("unknown vertex id " + std::to_string(v));
  }

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  double lmin_ = std::numeric_limits<double>::infinity();
};

/// Incremental construction; `build()` validates every structural invariant
/// and reports the first violated one. `build_unchecked()` skips validation
/// (diagnostic fixtures only).
class MetricGraphBuilder {
 public:
  VertexId add_vertex(bool at_infinity = false, bool dirichlet = false) {
    VertexId id = static_cast<VertexId>(g_.vertices_.size());
    g_.vertices_.push_back(Vertex{id, at_infinity, dirichlet});
    return id;
  }

  EdgeId add_edge(VertexId a, VertexId b, double length) {
    require_vertex(a);
    require_vertex(b);
    if (!std::isinf(length) && !(length >= kMinEdgeLength))
      throw GraphError("edge length " + std::to_string(length) +
                       " below minimum " + std::to_string(kMinEdgeLength));
    EdgeId id = static_cast<EdgeId>(g_.edges_.size());
    g_.edges_.push_back(Edge{id, a, b, length});
    return id;
  }

  /// Appends a fresh at-infinity vertex and the half-line reaching it.
  EdgeId add_half_line(VertexId from) {
    require_vertex(from);
    VertexId inf = add_vertex(/*at_infinity=*/true);
    return add_edge(from, inf, kHalfLine);
  }

  MetricGraph build() {
    MetricGraph g = build_unchecked();
    validate(g);
    return g;
  }

  MetricGraph build_unchecked() {
    MetricGraph g = std::move(g_);
    g_ = MetricGraph{};
    g.lmin_ = std::numeric_limits<double>::infinity();
    for (const Edge& e : g.edges_)
      if (!e.is_half_line()) g.lmin_ = std::min(g.lmin_, e.length);
    return g;
  }

  /// Throws GraphError naming the first violated invariant.
  static void validate(const MetricGraph& g) {
    if (g.num_vertices() == 0) throw GraphError("graph has no vertices");
    for (const Edge& e : g.edges()) {
      if (e.a < 0 || e.a >= g.num_vertices() || e.b < 0 ||
          e.b >= g.num_vertices())
        throw GraphError("edge " + std::to_string(e.id) +
                         ": endpoint out of range");
      if (!e.is_half_line() && e.length < kMinEdgeLength)
        throw GraphError("edge " + std::to_string(e.id) + ": length " +
                         std::to_string(e.length) + " below minimum");
      if (e.is_half_line()) {
        if (e.is_loop())
          throw GraphError("edge " + std::to_string(e.id) +
                           ": a half-line cannot be a loop");
        if (!g.vertex(e.b).at_infinity)
          throw GraphError("edge " + std::to_string(e.id) +
                           ": half-line must end at an at-infinity vertex");
      }
    }
    for (const Vertex& v : g.vertices()) {
      if (v.at_infinity) {
        if (v.dirichlet)
          throw GraphError("vertex " + std::to_string(v.id) +
                           ": at-infinity vertex cannot be Dirichlet");
        if (g.degree(v.id) != 1)
          throw GraphError("vertex " + std::to_string(v.id) +
                           ": at-infinity vertex must have degree 1");
        int half_lines = 0;
        for (const Edge& e : g.edges())
          if (e.is_half_line() && e.b == v.id) ++half_lines;
        if (half_lines != 1)
          throw GraphError("vertex " + std::to_string(v.id) +
                           ": at-infinity vertex must terminate exactly one "
                           "half-line");
      } else if (v.dirichlet) {
        if (g.degree(v.id) != 1)
          throw GraphError("vertex " + std::to_string(v.id) +
                           ": Dirichlet vertex must have degree 1");
      }
    }
    if (!connected(g)) throw GraphError("graph is not connected");
  }

  /// Combinatorial connectivity; at-infinity vertices count as endpoints.
  static bool connected(const MetricGraph& g) {
    int n = g.num_vertices();
    if (n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<VertexId> fifo;
    fifo.push(0);
    seen[0] = 1;
    int reached = 1;
    auto inc = g.incidence();
    while (!fifo.empty()) {
      VertexId v = fifo.front();
      fifo.pop();
      for (EdgeId eid : inc[static_cast<std::size_t>(v)]) {
        VertexId w = g.edge(eid).other(v);
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          fifo.push(w);
        }
      }
    }
    return reached == n;
  }

 private:
  void require_vertex(VertexId v) const {
    if (v < 0 || v >= static_cast<VertexId>(g_.vertices_.size()))
      throw GraphError("unknown vertex id " + std::to_string(v));
  }

  MetricGraph g_;
};

namespace detail {

inline MetricGraphBuilder copy_into_builder(const MetricGraph& g) {
  MetricGraphBuilder b;
  for (const Vertex& v : g.vertices()) b.add_vertex(v.at_infinity, v.dirichlet);
  for (const Edge& e : g.edges()) b.add_edge(e.a, e.b, e.length);
  return b;
}

}  // namespace detail

/// Inserts a degree-2 vertex on finite edge e at arc-length s from endpoint
/// a. The edge keeps its id for the [a, s] part; the [s, length] part gets a
/// fresh id. Metrically an isometry.
inline MetricGraph subdivide_edge(const MetricGraph& g, EdgeId e, double s) {
  const Edge& old = g.edge(e);
  if (old.is_half_line())
    throw GraphError("subdivide_edge: edge " + std::to_string(e) +
                     " is a half-line");
  if (!(s > 0.0) || !(s < old.length))
    throw GraphError("subdivide_edge: position " + std::to_string(s) +
                     " outside (0, " + std::to_string(old.length) + ")");
  MetricGraphBuilder b;
  for (const Vertex& v : g.vertices()) b.add_vertex(v.at_infinity, v.dirichlet);
  VertexId mid = b.add_vertex();
  for (const Edge& ed : g.edges()) {
    if (ed.id == e) {
      b.add_edge(ed.a, mid, s);
    } else {
      b.add_edge(ed.a, ed.b, ed.length);
    }
  }
  b.add_edge(mid, old.b, old.length - s);
  return b.build();
}

/// Attaches a fresh half-line (and its at-infinity vertex) at v.
inline MetricGraph attach_half_line(const MetricGraph& g, VertexId v) {
  const Vertex& vx = g.vertex(v);
  if (vx.at_infinity)
    throw GraphError("attach_half_line: vertex " + std::to_string(v) +
                     " is at infinity");
  if (vx.dirichlet)
    throw GraphError("attach_half_line: vertex " + std::to_string(v) +
                     " is Dirichlet");
  MetricGraphBuilder b = detail::copy_into_builder(g);
  b.add_half_line(v);
  return b.build();
}

}  // namespace graphnls

#endif  // GRAPHNLS_METRIC_GRAPH_HPP
