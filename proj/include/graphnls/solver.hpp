#ifndef GRAPHNLS_SOLVER_HPP
#define GRAPHNLS_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphnls/analytic.hpp"
#include "graphnls/discretization.hpp"
#include "graphnls/metric_graph.hpp"
#include "graphnls/spectrum.hpp"

namespace graphnls {

// -- action and Nehari projection --------------------------------------------

struct ActionReport {
  double J = 0.0;
  double Q = 0.0;     // ||u'||^2 + lambda ||u||^2
  double Lp_p = 0.0;
  double nehari_residual = 0.0;  // Q - Lp_p
  double n_lambda = std::numeric_limits<double>::quiet_NaN();
  bool zero_field = false;
};

inline ActionReport action(const DiscreteSpace& s, const DiscreteField& u,
                           const ProblemParams& params) {
  params.validate();
  Norms n = norms(s, u, params.p);
  ActionReport r;
  r.Q = n.H1_semi_sq + params.lambda * n.L2_sq;
  r.Lp_p = n.Lp_p;
  r.J = 0.5 * r.Q - n.Lp_p / params.p;
  r.nehari_residual = r.Q - r.Lp_p;
  if (n.Lp_p > 0.0) {
    r.n_lambda = std::pow(r.Q / r.Lp_p, 1.0 / (params.p - 2.0));
  } else {
    r.zero_field = true;
  }
  return r;
}

/// Scales u onto the Nehari set: n_lambda(u) * u. Exact up to rounding.
inline DiscreteField project_nehari(const DiscreteSpace& s,
                                    const DiscreteField& u,
                                    const ProblemParams& params) {
  ActionReport r = action(s, u, params);
  if (r.zero_field || !(r.Q > 0.0))
    throw std::invalid_argument("project_nehari: zero field");
  return DiscreteField{u.space, r.n_lambda * u.values};
}

// -- nodal structure ----------------------------------------------------------

enum class ZeroKind { kIsolatedPoint, kSegment, kRay };

inline const char* to_string(ZeroKind k) {
  switch (k) {
    case ZeroKind::kIsolatedPoint: return "ISOLATED_POINT";
    case ZeroKind::kSegment: return "SEGMENT";
    case ZeroKind::kRay: return "RAY";
  }
  return "ISOLATED_POINT";
}

struct ZeroComponent {
  ZeroKind kind = ZeroKind::kIsolatedPoint;
  EdgeId edge = -1;
  double position = 0.0;  // isolated point: arc length from endpoint a
  double start = 0.0;     // segments/rays: arc-length range on the edge
  double end = 0.0;
};

struct NodalStructure {
  int domain_count = 0;
  std::vector<ZeroComponent> zero_set;

  int count(ZeroKind k) const {
    int c = 0;
    for (const auto& z : zero_set) c += (z.kind == k);
    return c;
  }
};

/// Discrete zero set and nodal domains of a sign-changing field. Nodes with
/// |u| <= zero_tol * ||u||_inf are zero; per-edge runs of zero nodes spanning
/// >= 2 cells become SEGMENT (RAY when they reach a truncation cut), single
/// crossings become ISOLATED_POINT with interpolated location. Dirichlet and
/// truncation pins alone are boundary conditions, not nodal features.
inline NodalStructure nodal_structure(const DiscreteSpace& s,
                                      const DiscreteField& u,
                                      double zero_tol = 1e-6) {
  require_match(s, u);
  Eigen::VectorXd full = s.reconstruct_full(u.values);
  double umax = full.cwiseAbs().maxCoeff();
  if (!(umax > 0.0))
    throw std::invalid_argument("nodal_structure: all-zero field");
  double tol = zero_tol * umax;
  auto is_zero = [&](int node) { return std::abs(full[node]) <= tol; };

  // Eliminated nodes (Z vertices, cuts) are exact zeros by construction;
  // they only count as nodal features inside a wider zero run.
  std::vector<char> is_pin(static_cast<std::size_t>(s.num_full_nodes()), 0);
  for (const Vertex& v : s.graph().vertices())
    if (v.dirichlet || v.at_infinity)
      is_pin[static_cast<std::size_t>(s.vertex_node(v.id))] = 1;

  NodalStructure out;
  std::vector<char> vertex_zero_reported(
      static_cast<std::size_t>(s.num_full_nodes()), 0);

  for (const EdgeMesh& m : s.edge_meshes()) {
    int n = m.intervals();
    int i = 0;
    while (i <= n) {
      if (!is_zero(m.nodes[static_cast<std::size_t>(i)])) {
        // Look for a strict sign change across the next cell.
        if (i < n) {
          double a = full[m.nodes[static_cast<std::size_t>(i)]];
          double b = full[m.nodes[static_cast<std::size_t>(i + 1)]];
          if (a * b < 0.0 && !is_zero(m.nodes[static_cast<std::size_t>(i + 1)])) {
            ZeroComponent z;
            z.kind = ZeroKind::kIsolatedPoint;
            z.edge = m.edge;
            z.position =
                m.coord(i) + m.spacing * std::abs(a) / (std::abs(a) + std::abs(b));
            z.start = z.end = z.position;
            out.zero_set.push_back(z);
          }
        }
        ++i;
        continue;
      }
      int run_begin = i;
      while (i <= n && is_zero(m.nodes[static_cast<std::size_t>(i)])) ++i;
      int run_end = i - 1;  // inclusive
      int cells = run_end - run_begin;
      bool touches_cut = false;
      bool all_pins = true;
      for (int k = run_begin; k <= run_end; ++k) {
        int node = m.nodes[static_cast<std::size_t>(k)];
        touches_cut = touches_cut || s.is_cut_node(node);
        all_pins = all_pins && is_pin[static_cast<std::size_t>(node)];
      }
      if (cells >= 2) {
        ZeroComponent z;
        z.kind = touches_cut ? ZeroKind::kRay : ZeroKind::kSegment;
        z.edge = m.edge;
        z.start = m.coord(run_begin);
        z.end = m.coord(run_end);
        z.position = 0.5 * (z.start + z.end);
        out.zero_set.push_back(z);
      } else if (!all_pins) {
        // Short zero run: an isolated zero, possibly sitting on a vertex
        // shared between edges; report it once.
        int node = m.nodes[static_cast<std::size_t>(run_begin)];
        bool at_vertex = run_begin == 0 || run_end == n;
        if (!at_vertex || !vertex_zero_reported[static_cast<std::size_t>(node)]) {
          if (at_vertex) {
            int first = m.nodes[static_cast<std::size_t>(run_begin == 0 ? 0 : n)];
            vertex_zero_reported[static_cast<std::size_t>(first)] = 1;
          }
          ZeroComponent z;
          z.kind = ZeroKind::kIsolatedPoint;
          z.edge = m.edge;
          z.position = 0.5 * (m.coord(run_begin) + m.coord(run_end));
          z.start = m.coord(run_begin);
          z.end = m.coord(run_end);
          out.zero_set.push_back(z);
        }
      }
    }
  }

  // Nodal domains: components of nonzero nodes, linking same-sign neighbors.
  std::vector<int> comp(static_cast<std::size_t>(s.num_full_nodes()), -1);
  auto adj = mesh_adjacency(s);
  int n_domains = 0;
  for (int start = 0; start < s.num_full_nodes(); ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0 || is_zero(start)) continue;
    int label = n_domains++;
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = label;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, len] : adj[static_cast<std::size_t>(v)]) {
        (void)len;
        if (comp[static_cast<std::size_t>(w)] >= 0 || is_zero(w)) continue;
        if (full[v] * full[w] < 0.0) continue;
        comp[static_cast<std::size_t>(w)] = label;
        stack.push_back(w);
      }
    }
  }
  out.domain_count = n_domains;
  return out;
}

/// Fraction of the Lp mass within arc distance d_esc of any truncation cut;
/// zero on compact meshes. Large values flag a minimizing sequence sliding
/// toward the (truncated) ends of the half-lines.
inline double escape_diagnostic(const DiscreteSpace& s, const DiscreteField& u,
                                double d_esc, double p) {
  require_match(s, u);
  std::vector<double> dist = distance_to_cuts(s);
  Eigen::VectorXd full = s.reconstruct_full(u.values);
  const Eigen::VectorXd& w = s.weights_full();
  double near = 0.0, total = 0.0;
  for (int i = 0; i < s.num_full_nodes(); ++i) {
    double mass = w[i] * std::pow(std::abs(full[i]), p);
    total += mass;
    if (dist[static_cast<std::size_t>(i)] <= d_esc) near += mass;
  }
  return total > 0.0 ? near / total : 0.0;
}

// -- solver -------------------------------------------------------------------

struct SolverConfig {
  int max_iter = 8000;        // gradient iterations per restart
  double tol = 1e-10;         // relative objective decrease over the window
  int flat_window = 20;
  double tol_pde_factor = 1e-5;  // tol_pde = factor*||u||_inf*max(lambda,1)
  int restarts = -1;          // <0: edge count (ground) / edge pairs (nodal),
                              // both capped at 32
  std::uint64_t seed = 1;
  double phase_floor = 1e-6;  // nodal phase mass floor, fraction of total
  double d_esc = -1.0;        // <0: max(trunc/2, trunc-10)
  double lambda_margin = 1e-8;
  bool richardson = false;    // re-solve at h/2 and attach an error estimate
  int polish_max = 400;
};

struct SolveResult {
  std::shared_ptr<const DiscreteSpace> space;
  DiscreteField field;
  ActionReport report;
  bool converged = false;
  int iterations = 0;
  int restarts_run = 0;
  double escape_fraction = 0.0;
  PdeResidual residuals;
  std::optional<NodalStructure> nodal;
  double error_estimate = 0.0;
  double omega = 0.0;
  bool collapse = false;      // nodal: every restart lost one phase
  std::string diagnostic;
};

namespace detail {

inline double lp_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& u,
                     double p) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i)
    acc += w[i] * std::pow(std::abs(u[i]), p);
  return acc;
}

/// w * |u|^{p-2} u, the gradient of the lumped Lp functional up to factor p.
inline Eigen::VectorXd lp_force(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& u, double p) {
  Eigen::VectorXd f(u.size());
  for (int i = 0; i < u.size(); ++i)
    f[i] = w[i] * std::pow(std::abs(u[i]), p - 2.0) * u[i];
  return f;
}

struct Objective {
  const DiscreteSpace& s;
  ProblemParams params;
  Eigen::SparseMatrix<double> A;  // K + lambda M, positive definite

  Objective(const DiscreteSpace& space, const ProblemParams& pp)
      : s(space), params(pp), A(space.K() + pp.lambda * space.M()) {}

  double quad(const Eigen::VectorXd& u) const { return u.dot(A * u); }

  /// R(u) = (||u'||^2 + lambda ||u||^2) / ||u||_p^2.
  double rayleigh(const Eigen::VectorXd& u, double* Q_out = nullptr,
                  double* P_out = nullptr) const {
    double Q = quad(u);
    double P = lp_sum(s.weights(), u, params.p);
    if (Q_out) *Q_out = Q;
    if (P_out) *P_out = P;
    return Q / std::pow(P, 2.0 / params.p);
  }

  Eigen::VectorXd normalize_p(Eigen::VectorXd u) const {
    double P = lp_sum(s.weights(), u, params.p);
    if (!(P > 0.0)) throw std::runtime_error("iterate lost all mass");
    u *= std::pow(P, -1.0 / params.p);
    return u;
  }
};

/// Soliton profile along one edge, centered mid-edge, zero elsewhere.
inline Eigen::VectorXd edge_bump(const DiscreteSpace& s,
                                 const ProblemParams& params,
                                 std::size_t edge_index) {
  Soliton phi(std::max(params.lambda, 1e-3), params.p);
  const EdgeMesh& m = s.edge_meshes()[edge_index];
  Eigen::VectorXd u = Eigen::VectorXd::Zero(s.num_free());
  double mid = 0.5 * m.length;
  for (int i = 0; i <= m.intervals(); ++i) {
    int k = s.free_index(m.nodes[static_cast<std::size_t>(i)]);
    if (k >= 0) u[k] = phi(m.coord(i) - mid);
  }
  return u;
}

inline Eigen::VectorXd random_start(const DiscreteSpace& s,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  Eigen::VectorXd u(s.num_free());
  for (int i = 0; i < u.size(); ++i) u[i] = uni(rng);
  return u;
}

struct DescentOutcome {
  Eigen::VectorXd u;
  double value = 0.0;
  int iterations = 0;
  bool flat = false;      // objective settled
  bool collapsed = false; // nodal: a phase died
};

/// Monotone Barzilai-Borwein descent with backtracking. `eval` returns the
/// objective, `grad` its gradient, `post` is applied after every trial step
/// (absolute value and/or renormalization). `abort` may stop the run early.
template <typename Eval, typename Grad, typename Post, typename Abort>
DescentOutcome bb_descent(Eigen::VectorXd u0, const Eval& eval,
                          const Grad& grad, const Post& post,
                          const Abort& abort, const SolverConfig& cfg) {
  DescentOutcome out;
  Eigen::VectorXd u = post(std::move(u0));
  double f = eval(u);
  Eigen::VectorXd g = grad(u);
  Eigen::VectorXd u_prev, g_prev;
  double alpha = 1.0 / std::max(1.0, g.norm());
  std::vector<double> history{f};
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (abort(u)) {
      out.collapsed = true;
      break;
    }
    if (u_prev.size() > 0) {
      Eigen::VectorXd sv = u - u_prev;
      Eigen::VectorXd yv = g - g_prev;
      double sy = sv.dot(yv);
      if (sy > 1e-300)
        alpha = std::min(1e12, std::max(1e-14, sv.squaredNorm() / sy));
    }
    u_prev = u;
    g_prev = g;
    double f_trial = f;
    Eigen::VectorXd u_trial;
    bool accepted = false;
    double step = alpha;
    for (int bt = 0; bt < 50; ++bt) {
      u_trial = post(u_prev - step * g_prev);
      f_trial = eval(u_trial);
      if (f_trial <= f + 1e-14 * std::abs(f)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at rounding level
    u = std::move(u_trial);
    f = std::min(f_trial, f);
    g = grad(u);
    out.iterations = it + 1;
    history.push_back(f_trial);
    int w = cfg.flat_window;
    if (static_cast<int>(history.size()) > w) {
      double before = history[history.size() - 1 - static_cast<std::size_t>(w)];
      double decrease = before - f_trial;
      if (decrease <= cfg.tol * std::max(std::abs(f_trial), 1e-300)) {
        out.flat = true;
        break;
      }
    }
  }
  if (!out.collapsed && !out.flat) {
    // Stalled backtracking still counts as settled when the tail is flat.
    out.flat = history.size() >= 3 &&
               std::abs(history[history.size() - 3] - history.back()) <=
                   1e-10 * std::max(std::abs(history.back()), 1e-300);
  }
  out.u = std::move(u);
  out.value = f;
  return out;
}

/// Fixed-point tail polish for the one-signed Euler equation
/// A u = (Q/P) w |u|^{p-2} u, with the classic power-law stabilizer. Runs on
/// an index subset (the full space for ground states, one sign phase for
/// nodal states). Returns the number of steps applied.
inline int petviashvili_polish(const Objective& obj,
                               const std::vector<int>& subset,
                               Eigen::VectorXd& u_full, int max_steps) {
  const int ns = static_cast<int>(subset.size());
  if (ns == 0) return 0;
  // Restriction of A and the weights to the subset.
  std::vector<int> where(static_cast<std::size_t>(obj.A.rows()), -1);
  for (int k = 0; k < ns; ++k)
    where[static_cast<std::size_t>(subset[static_cast<std::size_t>(k)])] = k;
  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < obj.A.outerSize(); ++col) {
    int jc = where[static_cast<std::size_t>(col)];
    if (jc < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(obj.A, col); it; ++it) {
      int jr = where[static_cast<std::size_t>(it.row())];
      if (jr >= 0) trips.emplace_back(jr, jc, it.value());
    }
  }
  Eigen::SparseMatrix<double> As(ns, ns);
  As.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(As);
  if (solver.info() != Eigen::Success) return 0;

  Eigen::VectorXd ws(ns), v(ns);
  for (int k = 0; k < ns; ++k) {
    ws[k] = obj.s.weights()[subset[static_cast<std::size_t>(k)]];
    v[k] = u_full[subset[static_cast<std::size_t>(k)]];
  }
  double sign = v.sum() < 0.0 ? -1.0 : 1.0;
  v *= sign;
  const double p = obj.params.p;
  const double theta = (p - 1.0) / (p - 2.0);
  double res_prev = std::numeric_limits<double>::infinity();
  int steps = 0;
  for (; steps < max_steps; ++steps) {
    Eigen::VectorXd N = lp_force(ws, v, p);
    Eigen::VectorXd Av = As * v;
    double q = v.dot(Av), phi = v.dot(N);
    if (!(phi > 0.0)) break;
    double gamma = q / phi;
    double res = (Av - gamma * N).lpNorm<Eigen::Infinity>() /
                 std::max(Av.lpNorm<Eigen::Infinity>(), 1e-300);
    if (res < 1e-14 || res > 0.999 * res_prev) break;
    res_prev = res;
    Eigen::VectorXd next = solver.solve(N);
    v = std::pow(gamma, theta) * next.cwiseMax(0.0);
    if (!(v.lpNorm<Eigen::Infinity>() > 0.0)) break;
  }
  for (int k = 0; k < ns; ++k)
    u_full[subset[static_cast<std::size_t>(k)]] = sign * v[k];
  return steps;
}

inline double default_d_esc(const MeshParams& mp) {
  return std::max(0.5 * mp.trunc_length, mp.trunc_length - 10.0);
}

/// Midpoint mesh node of each meshed edge (for restart placement order).
inline std::vector<int> edge_mid_nodes(const DiscreteSpace& s) {
  std::vector<int> mids;
  for (const EdgeMesh& m : s.edge_meshes())
    mids.push_back(m.nodes[static_cast<std::size_t>(m.intervals() / 2)]);
  return mids;
}

}  // namespace detail

/// Action ground state: minimizes R(u) = (||u'||^2 + lambda||u||^2)/||u||_p^2
/// by projected gradient descent on the Lp unit sphere with Barzilai-Borwein
/// steps, nonnegativity enforced through |u|, multistart over per-edge
/// soliton bumps, and a fixed-point tail polish. The returned field is the
/// Nehari projection of the best iterate.
inline SolveResult ground_state(const MetricGraph& g,
                                const ProblemParams& params,
                                const MeshParams& mp, SolverConfig cfg = {});

/// Nodal ground state: minimizes kappa(R(u+)^{p/(p-2)} + R(u-)^{p/(p-2)})
/// with two-bump multistart over unordered edge pairs; collapse of either
/// phase triggers the next restart. Phases are projected to the Nehari set
/// separately at the end.
inline SolveResult nodal_ground_state(const MetricGraph& g,
                                      const ProblemParams& params,
                                      const MeshParams& mp,
                                      SolverConfig cfg = {});

namespace detail {

inline void check_lambda_window(const ProblemParams& params, double omega,
                                double margin) {
  if (params.lambda + omega <= margin)
    throw std::invalid_argument(
        "lambda = " + std::to_string(params.lambda) +
        " is not admissible: need lambda > -omega_Z = " +
        std::to_string(-omega));
}

inline SolveResult ground_state_single(const MetricGraph& g,
                                       const ProblemParams& params,
                                       const MeshParams& mp,
                                       const SolverConfig& cfg) {
  params.validate();
  auto space = std::make_shared<DiscreteSpace>(g, mp);
  const DiscreteSpace& s = *space;
  SolveResult result;
  result.space = space;
  result.omega = omega_Z(s);
  check_lambda_window(params, result.omega, cfg.lambda_margin);

  Objective obj(s, params);
  const double p = params.p;
  const double q_exp = p / (p - 2.0);
  const double kappa = params.kappa();

  auto eval = [&](const Eigen::VectorXd& u) { return obj.rayleigh(u); };
  auto grad = [&](const Eigen::VectorXd& u) {
    double Q, P;
    obj.rayleigh(u, &Q, &P);
    Eigen::VectorXd f = lp_force(s.weights(), u, p);
    Eigen::VectorXd gr =
        2.0 * (obj.A * u - (Q / P) * f) / std::pow(P, 2.0 / p);
    return gr;
  };
  auto post = [&](Eigen::VectorXd u) {
    return obj.normalize_p(u.cwiseAbs());
  };
  auto never = [](const Eigen::VectorXd&) { return false; };

  int n_edges = g.num_edges();
  int restarts = cfg.restarts >= 0 ? cfg.restarts : std::min(n_edges, 32);
  restarts = std::max(restarts, 1);

  double best = std::numeric_limits<double>::infinity();
  DescentOutcome best_run;
  std::vector<int> all_free(static_cast<std::size_t>(s.num_free()));
  for (int i = 0; i < s.num_free(); ++i) all_free[static_cast<std::size_t>(i)] = i;

  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd u0 =
        r < n_edges
            ? edge_bump(s, params, static_cast<std::size_t>(r))
            : random_start(s, cfg.seed + 0x9e3779b97f4a7c15ull * (r + 1));
    if (!(lp_sum(s.weights(), u0, p) > 0.0)) continue;
    DescentOutcome run = bb_descent(std::move(u0), eval, grad, post, never, cfg);
    run.iterations += petviashvili_polish(obj, all_free, run.u, cfg.polish_max);
    run.u = post(std::move(run.u));
    run.value = eval(run.u);
    if (run.value < best) {
      best = run.value;
      best_run = std::move(run);
    }
    ++result.restarts_run;
  }
  if (!std::isfinite(best)) throw std::runtime_error("all restarts failed");

  DiscreteField raw{&s, best_run.u};
  result.field = project_nehari(s, raw, params);
  result.report = action(s, result.field, params);
  result.iterations = best_run.iterations;
  result.residuals = pde_residual(s, result.field, params.lambda, p);
  double umax = result.field.values.cwiseAbs().maxCoeff();
  double tol_pde = cfg.tol_pde_factor * umax * std::max(params.lambda, 1.0);
  result.converged = best_run.flat &&
                     result.residuals.interior_max <= tol_pde &&
                     result.residuals.kirchhoff_max <= tol_pde;
  if (!result.converged)
    result.diagnostic = best_run.flat ? "pde residual above tolerance"
                                      : "objective did not settle";
  double d_esc = cfg.d_esc >= 0.0 ? cfg.d_esc : default_d_esc(mp);
  result.escape_fraction = escape_diagnostic(s, result.field, d_esc, p);
  (void)q_exp;
  (void)kappa;
  return result;
}

inline SolveResult nodal_ground_state_single(const MetricGraph& g,
                                             const ProblemParams& params,
                                             const MeshParams& mp,
                                             const SolverConfig& cfg) {
  params.validate();
  auto space = std::make_shared<DiscreteSpace>(g, mp);
  const DiscreteSpace& s = *space;
  if (s.num_free() < 2)
    throw std::invalid_argument("nodal solve needs at least 2 free DOFs");
  SolveResult result;
  result.space = space;
  result.omega = omega_Z(s);
  check_lambda_window(params, result.omega, cfg.lambda_margin);

  Objective obj(s, params);
  const double p = params.p;
  const double q_exp = p / (p - 2.0);
  const double kappa = params.kappa();

  struct PhaseData {
    double Rp, Rm, Pp, Pm;
  };
  auto phase_data = [&](const Eigen::VectorXd& u, PhaseData& d) {
    Eigen::VectorXd up = u.cwiseMax(0.0);
    Eigen::VectorXd um = u.cwiseMin(0.0);
    double Qp = obj.quad(up), Qm = obj.quad(um);
    d.Pp = lp_sum(s.weights(), up, p);
    d.Pm = lp_sum(s.weights(), um, p);
    d.Rp = d.Pp > 0.0 ? Qp / std::pow(d.Pp, 2.0 / p)
                      : std::numeric_limits<double>::infinity();
    d.Rm = d.Pm > 0.0 ? Qm / std::pow(d.Pm, 2.0 / p)
                      : std::numeric_limits<double>::infinity();
  };
  auto eval = [&](const Eigen::VectorXd& u) {
    PhaseData d;
    phase_data(u, d);
    if (!std::isfinite(d.Rp) || !std::isfinite(d.Rm))
      return std::numeric_limits<double>::infinity();
    return kappa * (std::pow(d.Rp, q_exp) + std::pow(d.Rm, q_exp));
  };
  auto grad = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd up = u.cwiseMax(0.0);
    Eigen::VectorXd um = u.cwiseMin(0.0);
    double Qp, Pp, Qm, Pm;
    double Rp, Rm;
    Qp = obj.quad(up);
    Pp = lp_sum(s.weights(), up, p);
    Qm = obj.quad(um);
    Pm = lp_sum(s.weights(), um, p);
    Rp = Qp / std::pow(Pp, 2.0 / p);
    Rm = Qm / std::pow(Pm, 2.0 / p);
    Eigen::VectorXd gp =
        2.0 * (obj.A * up - (Qp / Pp) * lp_force(s.weights(), up, p)) /
        std::pow(Pp, 2.0 / p);
    Eigen::VectorXd gm =
        2.0 * (obj.A * um - (Qm / Pm) * lp_force(s.weights(), um, p)) /
        std::pow(Pm, 2.0 / p);
    Eigen::VectorXd out(u.size());
    for (int i = 0; i < u.size(); ++i) {
      double gi = 0.0;
      if (u[i] > 0.0) gi = std::pow(Rp, q_exp - 1.0) * gp[i];
      if (u[i] < 0.0) gi = std::pow(Rm, q_exp - 1.0) * gm[i];
      out[i] = kappa * q_exp * gi;  // subgradient 0 where u == 0
    }
    return out;
  };
  auto post = [&](Eigen::VectorXd u) { return obj.normalize_p(std::move(u)); };
  auto collapsed = [&](const Eigen::VectorXd& u) {
    PhaseData d;
    phase_data(u, d);
    double total = d.Pp + d.Pm;
    return d.Pp < cfg.phase_floor * total || d.Pm < cfg.phase_floor * total;
  };

  // Restart pairs: bumps of opposite sign on two distinct edges. Pairs of
  // bounded edges come first, then by descending separation; nearby bumps
  // tend to merge and collapse.
  int n_edges = g.num_edges();
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_edges; ++i)
    for (int j = i + 1; j < n_edges; ++j) pairs.push_back({i, j});
  {
    std::vector<double> cut_dist = distance_to_cuts(s);
    auto mids = edge_mid_nodes(s);
    auto adj = mesh_adjacency(s);
    // Distance between edge midpoints via one Dijkstra per edge.
    std::vector<std::vector<double>> mid_dist;
    for (int e = 0; e < n_edges; ++e)
      mid_dist.push_back(
          mesh_distances(s, {mids[static_cast<std::size_t>(e)]}));
    auto half_lines = [&](int e) {
      return s.edge_meshes()[static_cast<std::size_t>(e)].truncated ? 1 : 0;
    };
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
      int ha = half_lines(a.first) + half_lines(a.second);
      int hb = half_lines(b.first) + half_lines(b.second);
      if (ha != hb) return ha < hb;
      double da = mid_dist[static_cast<std::size_t>(a.first)]
                          [static_cast<std::size_t>(
                              mids[static_cast<std::size_t>(a.second)])];
      double db = mid_dist[static_cast<std::size_t>(b.first)]
                          [static_cast<std::size_t>(
                              mids[static_cast<std::size_t>(b.second)])];
      return da > db;
    });
    (void)cut_dist;
    (void)adj;
  }
  int restarts = cfg.restarts >= 0 ? cfg.restarts
                                   : std::min<int>(static_cast<int>(pairs.size()), 32);
  restarts = std::min<int>(restarts, static_cast<int>(pairs.size()));
  restarts = std::max(restarts, 1);

  double best = std::numeric_limits<double>::infinity();
  DescentOutcome best_run;
  int n_collapsed = 0;
  for (int r = 0; r < restarts; ++r) {
    auto [ei, ej] = pairs[static_cast<std::size_t>(r)];
    Eigen::VectorXd u0 = edge_bump(s, params, static_cast<std::size_t>(ei)) -
                         edge_bump(s, params, static_cast<std::size_t>(ej));
    if (collapsed(u0)) {
      ++n_collapsed;
      ++result.restarts_run;
      continue;
    }
    DescentOutcome run = bb_descent(std::move(u0), eval, grad, post, collapsed, cfg);
    ++result.restarts_run;
    if (run.collapsed) {
      ++n_collapsed;
      continue;
    }
    // Pattern-restricted polish, one phase at a time.
    std::vector<int> plus, minus;
    for (int i = 0; i < run.u.size(); ++i) {
      if (run.u[i] > 0.0) plus.push_back(i);
      if (run.u[i] < 0.0) minus.push_back(i);
    }
    Eigen::VectorXd polished = run.u;
    int extra = petviashvili_polish(obj, plus, polished, cfg.polish_max);
    extra += petviashvili_polish(obj, minus, polished, cfg.polish_max);
    if (eval(polished) <= run.value * (1.0 + 1e-12)) {
      run.u = std::move(polished);
      run.value = eval(run.u);
      run.iterations += extra;
    }
    if (run.value < best) {
      best = run.value;
      best_run = std::move(run);
    }
  }

  if (!std::isfinite(best)) {
    result.collapse = true;
    result.converged = false;
    result.diagnostic =
        "all restarts collapsed to one sign; the nodal level likely equals "
        "twice the ground level and is not attained";
    return result;
  }

  // Phase-wise Nehari projection of the winner.
  Eigen::VectorXd up = best_run.u.cwiseMax(0.0);
  Eigen::VectorXd um = best_run.u.cwiseMin(0.0);
  DiscreteField fp = project_nehari(s, DiscreteField{&s, up}, params);
  DiscreteField fm = project_nehari(s, DiscreteField{&s, um}, params);
  result.field = DiscreteField{&s, fp.values + fm.values};
  ActionReport rp = action(s, fp, params);
  ActionReport rm = action(s, fm, params);
  result.report = action(s, result.field, params);
  result.report.J = rp.J + rm.J;  // J(u) = J(u+) + J(u-)
  result.iterations = best_run.iterations;
  result.residuals = pde_residual(s, result.field, params.lambda, p);
  double umax = result.field.values.cwiseAbs().maxCoeff();
  double tol_pde = cfg.tol_pde_factor * umax * std::max(params.lambda, 1.0);
  result.converged = best_run.flat &&
                     result.residuals.interior_max <= tol_pde &&
                     result.residuals.kirchhoff_max <= tol_pde;
  if (n_collapsed == result.restarts_run) result.collapse = true;
  if (!result.converged)
    result.diagnostic = best_run.flat ? "pde residual above tolerance"
                                      : "objective did not settle";
  double d_esc = cfg.d_esc >= 0.0 ? cfg.d_esc : default_d_esc(mp);
  result.escape_fraction = escape_diagnostic(s, result.field, d_esc, p);
  result.nodal = nodal_structure(s, result.field);
  return result;
}

template <typename Single>
SolveResult with_richardson(const Single& single, const MeshParams& mp,
                            const SolverConfig& cfg) {
  if (!cfg.richardson) return single(mp, cfg);
  SolverConfig inner = cfg;
  inner.richardson = false;
  SolveResult coarse = single(mp, inner);
  MeshParams fine = mp;
  fine.h_target = 0.5 * mp.h_target;
  SolveResult result = single(fine, inner);
  // Second-order elements: the h/2 error is about a third of the level
  // difference; the factor 2 is a safety margin.
  result.error_estimate =
      2.0 * std::abs(coarse.report.J - result.report.J) / 3.0;
  return result;
}

}  // namespace detail

inline SolveResult ground_state(const MetricGraph& g,
                                const ProblemParams& params,
                                const MeshParams& mp, SolverConfig cfg) {
  return detail::with_richardson(
      [&](const MeshParams& m, const SolverConfig& c) {
        return detail::ground_state_single(g, params, m, c);
      },
      mp, cfg);
}

inline SolveResult nodal_ground_state(const MetricGraph& g,
                                      const ProblemParams& params,
                                      const MeshParams& mp, SolverConfig cfg) {
  return detail::with_richardson(
      [&](const MeshParams& m, const SolverConfig& c) {
        return detail::nodal_ground_state_single(g, params, m, c);
      },
      mp, cfg);
}

}  // namespace graphnls

#endif  // GRAPHNLS_SOLVER_HPP
