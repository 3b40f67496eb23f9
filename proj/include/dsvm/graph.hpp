#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsvm/errors.hpp"

namespace dsvm {

using Index = Eigen::Index;
using Edge = std::pair<Index, Index>;

/// Undirected, unweighted, connected graph of computing nodes.
///
/// The Laplacian is kept implicit in the neighbor lists; `laplacian()`
/// materializes the dense matrix for spectral queries and tests.
class Graph {
 public:
  /// Throws InvalidEdge (out of range, self-loop, duplicate) or
  /// DisconnectedGraph.
  Graph(Index node_count, std::span<const Edge> edges);

  static Graph complete(Index node_count);
  static Graph path(Index node_count);
  static Graph ring(Index node_count);
  /// "complete" | "path" | "ring"
  static Graph from_topology(std::string_view name, Index node_count);

  Index node_count() const { return node_count_; }
  /// Edges normalized to (low, high), sorted ascending.
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbors of node j, ascending.
  const std::vector<Index>& neighbors(Index j) const { return neighbors_[j]; }
  Index degree(Index j) const { return static_cast<Index>(neighbors_[j].size()); }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lap =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(node_count_, node_count_);
    for (const auto& [a, b] : edges_) {
      lap(a, b) = Scalar(-1);
      lap(b, a) = Scalar(-1);
      lap(a, a) += Scalar(1);
      lap(b, b) += Scalar(1);
    }
    return lap;
  }

 private:
  Index node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> neighbors_;
};

/// Blockwise Laplacian action (L ⊗ I_d) on per-node blocks stored as the
/// columns of a d×m matrix: out.col(j) = Σ_{l∈N_j} (v.col(j) − v.col(l)).
/// Neighbors are summed in ascending order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian_apply(
    const Graph& graph, const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.cols() != graph.node_count()) {
    throw ShapeMismatch("laplacian_apply: expected one block per node");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(v.rows(), v.cols());
  for (Index j = 0; j < graph.node_count(); ++j) {
    out.col(j).setZero();
    for (Index l : graph.neighbors(j)) {
      out.col(j) += v.col(j) - v.col(l);
    }
  }
  return out;
}

/// Stacked form: v holds m consecutive blocks of size block_dim, i.e. the
/// product (L ⊗ I_d)·v. Use block_dim = 1 for per-node scalars.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> laplacian_apply(
    const Graph& graph, const Eigen::MatrixBase<Derived>& v, Index block_dim) {
  using Scalar = typename Derived::Scalar;
  if (v.cols() != 1 || block_dim < 1 || v.rows() != block_dim * graph.node_count()) {
    throw ShapeMismatch("laplacian_apply: stacked vector does not hold m blocks of block_dim");
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> flat = v;
  const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> blocks(
      flat.data(), block_dim, graph.node_count());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = laplacian_apply(graph, blocks);
  return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(out.data(), out.size());
}

/// Algebraic connectivity, the second-smallest Laplacian eigenvalue.
/// Zero for the single-node graph, which has no second eigenvalue.
double lambda2(const Graph& graph);

/// Gain bound 2·λ2(L) reported for the primal subsystem.
inline double primal_gain_bound(const Graph& graph) { return 2.0 * lambda2(graph); }

}  // namespace dsvm
