#ifndef GRAPHNLS_GRAPH_IO_HPP
#define GRAPHNLS_GRAPH_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "graphnls/metric_graph.hpp"

namespace graphnls {

/// Graph file schema:
/// { "vertices": [{"id":0,"infinity":false,"dirichlet":false}, ...],
///   "edges":    [{"id":0,"from":0,"to":1,"length":2.5} |
///                {"id":1,"from":0,"to":2,"length":"halfline"}, ...] }
inline nlohmann::json to_json(const MetricGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Vertex& v : g.vertices())
    j["vertices"].push_back({{"id", v.id},
                             {"infinity", v.at_infinity},
                             {"dirichlet", v.dirichlet}});
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    nlohmann::json je{{"id", e.id}, {"from", e.a}, {"to", e.b}};
    if (e.is_half_line())
      je["length"] = "halfline";
    else
      je["length"] = e.length;
    j["edges"].push_back(je);
  }
  return j;
}

/// Parses and validates; throws GraphError naming the first violation.
inline MetricGraph graph_from_json(const nlohmann::json& j) {
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw GraphError("graph file: missing \"vertices\" array");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw GraphError("graph file: missing \"edges\" array");

  const auto& jv = j["vertices"];
  MetricGraphBuilder b;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const auto& v = jv[i];
    if (!v.contains("id") || !v["id"].is_number_integer())
      throw GraphError("vertex entry " + std::to_string(i) +
                       ": missing integer \"id\"");
    if (v["id"].get<int>() != static_cast<int>(i))
      throw GraphError("vertex entry " + std::to_string(i) +
                       ": ids must be dense 0..n-1 in order");
    b.add_vertex(v.value("infinity", false), v.value("dirichlet", false));
  }
  int n_vertices = static_cast<int>(jv.size());
  const auto& je = j["edges"];
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto& e = je[i];
    if (!e.contains("id") || e["id"].get<int>() != static_cast<int>(i))
      throw GraphError("edge entry " + std::to_string(i) +
                       ": ids must be dense 0..m-1 in order");
    if (!e.contains("from") || !e.contains("to"))
      throw GraphError("edge " + std::to_string(i) +
                       ": missing \"from\"/\"to\"");
    int from = e["from"].get<int>();
    int to = e["to"].get<int>();
    if (from < 0 || from >= n_vertices || to < 0 || to >= n_vertices)
      throw GraphError("edge " + std::to_string(i) +
                       ": endpoint out of range");
    if (!e.contains("length"))
      throw GraphError("edge " + std::to_string(i) + ": missing \"length\"");
    double length;
    if (e["length"].is_string()) {
      if (e["length"].get<std::string>() != "halfline")
        throw GraphError("edge " + std::to_string(i) +
                         ": length string must be \"halfline\"");
      length = kHalfLine;
    } else if (e["length"].is_number()) {
      length = e["length"].get<double>();
      if (!(length >= kMinEdgeLength))
        throw GraphError("edge " + std::to_string(i) + ": length " +
                         std::to_string(length) + " below minimum");
    } else {
      throw GraphError("edge " + std::to_string(i) + ": bad \"length\"");
    }
    b.add_edge(from, to, length);
  }
  MetricGraph g = b.build_unchecked();
  MetricGraphBuilder::validate(g);
  return g;
}

inline MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw GraphError("graph file " + path + ": " + err.what());
  }
  return graph_from_json(j);
}

inline void save_graph(const MetricGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write graph file: " + path);
  out << to_json(g).dump(2) << "\n";
}

}  // namespace graphnls

#endif  // GRAPHNLS_GRAPH_IO_HPP
