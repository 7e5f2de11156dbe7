#ifndef GRAPHNLS_TESTS_RANDOM_GRAPHS_HPP
#define GRAPHNLS_TESTS_RANDOM_GRAPHS_HPP

#include <random>

#include "graphnls/metric_graph.hpp"

namespace graphnls_tests {

/// Small connected graphs with valid invariants: random spanning tree plus
/// extra edges/loops, a few half-lines, and optional Dirichlet pendants.
inline graphnls::MetricGraph random_graph(std::mt19937_64& rng,
                                          int min_half_lines = 0) {
  using graphnls::MetricGraphBuilder;
  auto uni_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uni_len = [&]() {
    return std::uniform_real_distribution<double>(0.3, 3.0)(rng);
  };
  MetricGraphBuilder b;
  int n_core = uni_int(2, 5);
  for (int v = 0; v < n_core; ++v) b.add_vertex();
  for (int v = 1; v < n_core; ++v) b.add_edge(uni_int(0, v - 1), v, uni_len());
  int extra = uni_int(0, 2);
  for (int k = 0; k < extra; ++k)
    b.add_edge(uni_int(0, n_core - 1), uni_int(0, n_core - 1), uni_len());
  int half_lines = uni_int(min_half_lines, 2);
  for (int k = 0; k < half_lines; ++k) b.add_half_line(uni_int(0, n_core - 1));
  int dirichlet_pendants = uni_int(0, 2);
  for (int k = 0; k < dirichlet_pendants; ++k) {
    int tip = b.add_vertex(false, /*dirichlet=*/true);
    b.add_edge(uni_int(0, n_core - 1), tip, uni_len());
  }
  return b.build();
}

}  // namespace graphnls_tests

#endif  // GRAPHNLS_TESTS_RANDOM_GRAPHS_HPP
