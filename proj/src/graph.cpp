#include "dsvm/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace dsvm {

Graph::Graph(Index node_count, std::span<const Edge> edges) : node_count_(node_count) {
  if (node_count < 1) throw InvalidParam("graph needs at least one node");

  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw InvalidEdge("edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") is out of range for " + std::to_string(node_count) + " nodes");
    }
    if (a == b) throw InvalidEdge("self-loop at node " + std::to_string(a));
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw InvalidEdge("duplicate edge (" + std::to_string(dup->first) + "," +
                      std::to_string(dup->second) + ")");
  }

  neighbors_.assign(node_count, {});
  for (const auto& [a, b] : edges_) {
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());

  // Union-find over the edge set.
  std::vector<Index> parent(node_count);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  Index components = node_count;
  for (const auto& [a, b] : edges_) {
    Index ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  if (components != 1) {
    throw DisconnectedGraph("graph with " + std::to_string(node_count) + " nodes has " +
                            std::to_string(components) + " connected components");
  }
}

Graph Graph::complete(Index node_count) {
  std::vector<Edge> edges;
  for (Index a = 0; a < node_count; ++a)
    for (Index b = a + 1; b < node_count; ++b) edges.emplace_back(a, b);
  return Graph(node_count, edges);
}

Graph Graph::path(Index node_count) {
  std::vector<Edge> edges;
  for (Index a = 0; a + 1 < node_count; ++a) edges.emplace_back(a, a + 1);
  return Graph(node_count, edges);
}

Graph Graph::ring(Index node_count) {
  // Rings on fewer than three nodes degenerate to the path.
  if (node_count < 3) return path(node_count);
  std::vector<Edge> edges;
  for (Index a = 0; a < node_count; ++a) edges.emplace_back(a, (a + 1) % node_count);
  return Graph(node_count, edges);
}

Graph Graph::from_topology(std::string_view name, Index node_count) {
  if (name == "complete") return complete(node_count);
  if (name == "path") return path(node_count);
  if (name == "ring") return ring(node_count);
  throw InvalidParam("unknown topology '" + std::string(name) + "'");
}

double lambda2(const Graph& graph) {
  if (graph.node_count() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.laplacian<double>(),
                                                        Eigen::EigenvaluesOnly);
  // Eigenvalues come back in ascending order.
  return solver.eigenvalues()(1);
}

}  // namespace dsvm
