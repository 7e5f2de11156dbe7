#ifndef GRAPHNLS_DISCRETIZATION_HPP
#define GRAPHNLS_DISCRETIZATION_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphnls/metric_graph.hpp"

namespace graphnls {

struct MeshParams {
  double h_target = 0.01;     // requested spacing, arc-length units
  double trunc_length = 40.0; // half-line cut, Dirichlet at the far end

  void validate(const MetricGraph& g) const {
    if (!(h_target > 0.0)) throw std::invalid_argument("h_target must be > 0");
    if (!(trunc_length >= 10.0 * h_target))
      throw std::invalid_argument("trunc_length must be >= 10*h_target");
    if (g.l_min() < 2.0 * h_target)
      throw std::invalid_argument(
          "mesh too coarse: h_target must be <= l_min/2");
  }
};

/// One meshed edge: nodes[0] sits at endpoint a, nodes[n] at endpoint b (for
/// truncated half-lines, at the cut).
struct EdgeMesh {
  EdgeId edge = -1;
  double spacing = 0.0;
  double length = 0.0;  // meshed length (trunc_length for half-lines)
  bool truncated = false;
  std::vector<int> nodes;  // full-node ids

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double coord(int i) const { return spacing * i; }  // arc length from a
};

/// Continuous piecewise-linear space on the meshed graph. Vertex DOFs are
/// shared across incident edges; Dirichlet vertices and truncation cuts are
/// eliminated. K and M act on free DOFs; quadrature weights are the row sums
/// of the unreduced mass matrix (trapezoid weights).
class DiscreteSpace {
 public:
  DiscreteSpace(MetricGraph graph, MeshParams params)
      : graph_(std::move(graph)), params_(params) {
    params_.validate(graph_);
    if (!MetricGraphBuilder::connected(graph_))
      throw std::invalid_argument("assemble: graph is not connected");
    build_mesh();
    assemble_matrices();
  }

  const MetricGraph& graph() const { return graph_; }
  const MeshParams& mesh_params() const { return params_; }
  const std::vector<EdgeMesh>& edge_meshes() const { return edge_meshes_; }

  int num_full_nodes() const { return num_full_nodes_; }
  int num_free() const { return static_cast<int>(free_to_full_.size()); }
  int free_index(int full_node) const {
    return full_to_free_[static_cast<std::size_t>(full_node)];
  }
  int full_index(int free_dof) const {
    return free_to_full_[static_cast<std::size_t>(free_dof)];
  }
  bool is_cut_node(int full_node) const {
    return node_is_cut_[static_cast<std::size_t>(full_node)] != 0;
  }
  /// Full node carrying a given vertex value (the cut node for at-infinity
  /// vertices, which is always eliminated).
  int vertex_node(VertexId v) const {
    return vertex_node_[static_cast<std::size_t>(v)];
  }

  const Eigen::SparseMatrix<double>& K() const { return K_; }
  const Eigen::SparseMatrix<double>& M() const { return M_; }
  /// Trapezoid weights restricted to free DOFs.
  const Eigen::VectorXd& weights() const { return w_free_; }
  /// Trapezoid weights on all mesh nodes, eliminated ones included.
  const Eigen::VectorXd& weights_full() const { return w_full_; }
  /// Sum of trapezoid weights over all mesh nodes, eliminated ones included;
  /// equals the total meshed length.
  double total_weight() const { return total_weight_; }
  double total_meshed_length() const { return total_meshed_length_; }

  Eigen::VectorXd reconstruct_full(const Eigen::VectorXd& free_values) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(num_full_nodes_);
    for (int k = 0; k < num_free(); ++k)
      full[full_index(k)] = free_values[k];
    return full;
  }

 private:
  void build_mesh() {
    int n_vertices = graph_.num_vertices();
    vertex_node_.assign(static_cast<std::size_t>(n_vertices), -1);
    num_full_nodes_ = 0;
    for (VertexId v = 0; v < n_vertices; ++v)
      if (!graph_.vertex(v).at_infinity)
        vertex_node_[static_cast<std::size_t>(v)] = num_full_nodes_++;

    total_meshed_length_ = 0.0;
    for (const Edge& e : graph_.edges()) {
      EdgeMesh m;
      m.edge = e.id;
      m.truncated = e.is_half_line();
      m.length = m.truncated ? params_.trunc_length : e.length;
      int n = std::max(2, static_cast<int>(std::ceil(
                               m.length / params_.h_target - 1e-12)));
      m.spacing = m.length / n;
      m.nodes.resize(static_cast<std::size_t>(n + 1));
      m.nodes.front() = vertex_node_[static_cast<std::size_t>(e.a)];
      for (int i = 1; i < n; ++i)
        m.nodes[static_cast<std::size_t>(i)] = num_full_nodes_++;
      if (m.truncated) {
        int cut = num_full_nodes_++;
        m.nodes.back() = cut;
        vertex_node_[static_cast<std::size_t>(e.b)] = cut;
      } else {
        m.nodes.back() = vertex_node_[static_cast<std::size_t>(e.b)];
      }
      total_meshed_length_ += m.length;
      edge_meshes_.push_back(std::move(m));
    }

    node_is_cut_.assign(static_cast<std::size_t>(num_full_nodes_), 0);
    std::vector<char> eliminated(static_cast<std::size_t>(num_full_nodes_), 0);
    for (const Vertex& v : graph_.vertices()) {
      if (v.dirichlet)
        eliminated[static_cast<std::size_t>(
            vertex_node_[static_cast<std::size_t>(v.id)])] = 1;
      if (v.at_infinity) {
        int cut = vertex_node_[static_cast<std::size_t>(v.id)];
        eliminated[static_cast<std::size_t>(cut)] = 1;
        node_is_cut_[static_cast<std::size_t>(cut)] = 1;
      }
    }
    full_to_free_.assign(static_cast<std::size_t>(num_full_nodes_), -1);
    for (int full = 0; full < num_full_nodes_; ++full) {
      if (!eliminated[static_cast<std::size_t>(full)]) {
        full_to_free_[static_cast<std::size_t>(full)] =
            static_cast<int>(free_to_full_.size());
        free_to_full_.push_back(full);
      }
    }
    if (free_to_full_.empty())
      throw std::invalid_argument("assemble: no free DOFs");
  }

  void assemble_matrices() {
    int n = num_free();
    std::vector<Eigen::Triplet<double>> kt, mt;
    Eigen::VectorXd w_full = Eigen::VectorXd::Zero(num_full_nodes_);
    for (const EdgeMesh& m : edge_meshes_) {
      double h = m.spacing;
      for (int i = 0; i < m.intervals(); ++i) {
        int fa = m.nodes[static_cast<std::size_t>(i)];
        int fb = m.nodes[static_cast<std::size_t>(i + 1)];
        w_full[fa] += 0.5 * h;
        w_full[fb] += 0.5 * h;
        int ia = free_index(fa), ib = free_index(fb);
        // Element stiffness (1/h)[[1,-1],[-1,1]], mass (h/6)[[2,1],[1,2]].
        if (ia >= 0) {
          kt.emplace_back(ia, ia, 1.0 / h);
          mt.emplace_back(ia, ia, h / 3.0);
        }
        if (ib >= 0) {
          kt.emplace_back(ib, ib, 1.0 / h);
          mt.emplace_back(ib, ib, h / 3.0);
        }
        if (ia >= 0 && ib >= 0) {
          kt.emplace_back(ia, ib, -1.0 / h);
          kt.emplace_back(ib, ia, -1.0 / h);
          mt.emplace_back(ia, ib, h / 6.0);
          mt.emplace_back(ib, ia, h / 6.0);
        }
      }
    }
    K_.resize(n, n);
    M_.resize(n, n);
    K_.setFromTriplets(kt.begin(), kt.end());
    M_.setFromTriplets(mt.begin(), mt.end());
    K_.makeCompressed();
    M_.makeCompressed();
    total_weight_ = w_full.sum();
    w_full_ = std::move(w_full);
    w_free_.resize(n);
    for (int k = 0; k < n; ++k) w_free_[k] = w_full_[full_index(k)];
  }

  MetricGraph graph_;
  MeshParams params_;
  std::vector<EdgeMesh> edge_meshes_;
  int num_full_nodes_ = 0;
  std::vector<int> vertex_node_;
  std::vector<int> full_to_free_;
  std::vector<int> free_to_full_;
  std::vector<char> node_is_cut_;
  Eigen::SparseMatrix<double> K_, M_;
  Eigen::VectorXd w_free_, w_full_;
  double total_weight_ = 0.0;
  double total_meshed_length_ = 0.0;
};

inline DiscreteSpace assemble(const MetricGraph& g, const MeshParams& mp) {
  return DiscreteSpace(g, mp);
}

struct DiscreteField {
  const DiscreteSpace* space = nullptr;
  Eigen::VectorXd values;  // free DOFs

  double vertex_value(VertexId v) const {
    int full = space->vertex_node(v);
    int k = space->free_index(full);
    return k >= 0 ? values[k] : 0.0;
  }
};

inline void require_match(const DiscreteSpace& s, const DiscreteField& u) {
  if (u.space != &s || u.values.size() != s.num_free())
    throw std::invalid_argument("field does not belong to this space");
}

/// Nodal interpolation of a function given per-edge as arc-length position
/// from endpoint a. On shared vertices the last incident edge wins, so f
/// should be continuous across vertices.
inline DiscreteField interpolate(
    const DiscreteSpace& s,
    const std::function<double(EdgeId, double)>& f) {
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(s.num_free());
  for (const EdgeMesh& m : s.edge_meshes()) {
    for (int i = 0; i <= m.intervals(); ++i) {
      int k = s.free_index(m.nodes[static_cast<std::size_t>(i)]);
      if (k >= 0) vals[k] = f(m.edge, m.coord(i));
    }
  }
  return DiscreteField{&s, std::move(vals)};
}

struct Norms {
  double L2_sq = 0.0;
  double H1_semi_sq = 0.0;
  double Lp_p = 0.0;
};

inline Norms norms(const DiscreteSpace& s, const DiscreteField& u, double p) {
  if (!(p > 2.0)) throw std::invalid_argument("norms: p must exceed 2");
  require_match(s, u);
  Norms n;
  n.L2_sq = u.values.dot(s.M() * u.values);
  n.H1_semi_sq = u.values.dot(s.K() * u.values);
  const Eigen::VectorXd& w = s.weights();
  double lp = 0.0;
  for (int i = 0; i < u.values.size(); ++i)
    lp += w[i] * std::pow(std::abs(u.values[i]), p);
  n.Lp_p = lp;
  return n;
}

struct PdeResidual {
  double interior_max = 0.0;
  double kirchhoff_max = 0.0;
};

/// Pointwise strong-form residual. Interior nodes use the central second
/// difference; vertex balances use second-order one-sided stencils. Stencils
/// straddling a strict sign change are skipped: those cells are the nodal
/// interface of the sign decomposition, not the interior of a nodal domain.
inline PdeResidual pde_residual(const DiscreteSpace& s, const DiscreteField& u,
                                double lambda, double p) {
  require_match(s, u);
  Eigen::VectorXd full = s.reconstruct_full(u.values);
  PdeResidual r;

  auto sign_change = [](double x, double y) { return x * y < 0.0; };

  for (const EdgeMesh& m : s.edge_meshes()) {
    double h2 = m.spacing * m.spacing;
    for (int i = 1; i < m.intervals(); ++i) {
      double um = full[m.nodes[static_cast<std::size_t>(i - 1)]];
      double uc = full[m.nodes[static_cast<std::size_t>(i)]];
      double up = full[m.nodes[static_cast<std::size_t>(i + 1)]];
      if (sign_change(um, uc) || sign_change(uc, up)) continue;
      double second = (um - 2.0 * uc + up) / h2;
      double res = second + std::pow(std::abs(uc), p - 2.0) * uc - lambda * uc;
      r.interior_max = std::max(r.interior_max, std::abs(res));
    }
  }

  auto inc = s.graph().incidence();
  for (const Vertex& v : s.graph().vertices()) {
    if (v.at_infinity || v.dirichlet) continue;
    int k = s.free_index(s.vertex_node(v.id));
    if (k < 0) continue;
    double sum = 0.0;
    bool skip = false;
    double uv = full[s.vertex_node(v.id)];
    for (const EdgeMesh& m : s.edge_meshes()) {
      const Edge& e = s.graph().edge(m.edge);
      auto one_sided = [&](int n0, int n1, int n2) {
        double u0 = full[m.nodes[static_cast<std::size_t>(n0)]];
        double u1 = full[m.nodes[static_cast<std::size_t>(n1)]];
        double u2 = full[m.nodes[static_cast<std::size_t>(n2)]];
        if (sign_change(uv, u1) || sign_change(u1, u2)) skip = true;
        return (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * m.spacing);
      };
      int n = m.intervals();
      if (e.a == v.id) sum += one_sided(0, 1, 2);
      if (e.b == v.id && !m.truncated) sum += one_sided(n, n - 1, n - 2);
    }
    if (!skip) r.kirchhoff_max = std::max(r.kirchhoff_max, std::abs(sum));
  }
  return r;
}

/// Mesh adjacency straight from the edge meshes.
inline std::vector<std::vector<std::pair<int, double>>> mesh_adjacency(
    const DiscreteSpace& s) {
  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<std::size_t>(s.num_full_nodes()));
  for (const EdgeMesh& m : s.edge_meshes())
    for (int i = 0; i < m.intervals(); ++i) {
      int a = m.nodes[static_cast<std::size_t>(i)];
      int b = m.nodes[static_cast<std::size_t>(i + 1)];
      adj[static_cast<std::size_t>(a)].push_back({b, m.spacing});
      adj[static_cast<std::size_t>(b)].push_back({a, m.spacing});
    }
  return adj;
}

/// Arc-length distance from every full node to the given source nodes
/// (+inf when unreachable); multi-source Dijkstra on the mesh graph.
inline std::vector<double> mesh_distances(const DiscreteSpace& s,
                                          const std::vector<int>& sources) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(s.num_full_nodes()), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int n : sources) {
    dist[static_cast<std::size_t>(n)] = 0.0;
    heap.push({0.0, n});
  }
  if (heap.empty()) return dist;
  auto adj = mesh_adjacency(s);
  while (!heap.empty()) {
    auto [d, n] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(n)]) continue;
    for (auto [w, len] : adj[static_cast<std::size_t>(n)]) {
      double cand = d + len;
      if (cand < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = cand;
        heap.push({cand, w});
      }
    }
  }
  return dist;
}

/// Distance to the nearest truncation cut; the escape diagnostic's metric.
inline std::vector<double> distance_to_cuts(const DiscreteSpace& s) {
  std::vector<int> cuts;
  for (int n = 0; n < s.num_full_nodes(); ++n)
    if (s.is_cut_node(n)) cuts.push_back(n);
  return mesh_distances(s, cuts);
}

}  // namespace graphnls

#endif  // GRAPHNLS_DISCRETIZATION_HPP
