#pragma once

// Dense numeric kernel shared by every embedder: pairwise distances, k-NN
// graphs, symmetric / generalized symmetric eigenpairs, thin SVD and
// geodesic (graph shortest-path) distances.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace drens {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric, zero-diagonal, nonnegative n x n matrix of metric distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Validates symmetry (exact), zero diagonal and nonnegativity.
  explicit DistanceMatrix(Matrix d);

  Index size() const { return d_.rows(); }
  double operator()(Index i, Index j) const { return d_(i, j); }
  const Matrix& matrix() const { return d_; }

 private:
  Matrix d_;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(static_cast<double>(m(i, j)))) return false;
  return true;
}

/// Euclidean distances between the rows of `x`.
template <typename Derived>
DistanceMatrix pairwise_distances(const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() < 1) throw std::invalid_argument("pairwise_distances: empty input");
  if (!all_finite(x))
    throw std::invalid_argument("pairwise_distances: input contains non-finite entries");
  const Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (Index c = 0; c < x.cols(); ++c) {
        const double diff = static_cast<double>(x(i, c)) - static_cast<double>(x(j, c));
        s += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  }
  return DistanceMatrix(std::move(d));
}

struct Neighbor {
  Index index;
  double distance;
};

/// Weighted adjacency lists. Unsymmetrized graphs list each node's k nearest
/// others ordered by (distance, index); symmetrized graphs are ordered by index.
struct NeighborGraph {
  Index k = 0;
  bool symmetric = false;
  std::vector<std::vector<Neighbor>> adjacency;

  Index size() const { return static_cast<Index>(adjacency.size()); }
  bool has_edge(Index from, Index to) const;
  /// Adds the undirected edge (i, j) to a symmetrized graph.
  void add_edge(Index i, Index j, double distance);
  /// Undirected edges when symmetric, directed list entries otherwise.
  std::size_t edge_count() const;
};

/// k nearest neighbours per node (ties to the lower index).
NeighborGraph knn_graph(const DistanceMatrix& d, Index k, bool symmetrize);

/// Union rule: keeps (i, j) if either endpoint lists the other. Idempotent.
NeighborGraph symmetrized(const NeighborGraph& g);

/// Component label per node, labels numbered by first appearance.
std::vector<Index> connected_components(const NeighborGraph& g);

enum class Spectrum { largest, smallest };

struct EigenPairs {
  Vector values;   // descending for `largest`, ascending for `smallest`
  Matrix vectors;  // one column per value
};

/// Orients each column so its largest-magnitude entry (first on ties) is positive.
void canonicalize_signs(Matrix& vectors);

/// `count` eigenpairs of a symmetric matrix from the requested end of the spectrum.
EigenPairs sym_eigen(const Matrix& a, Index count, Spectrum which);

/// Smallest-value pairs of L y = lambda D y for diagonal positive D.
/// Vectors are D-orthonormal.
EigenPairs gen_sym_eigen(const Matrix& l, const Vector& d_diagonal, Index count);
EigenPairs gen_sym_eigen(const Matrix& l, const Matrix& d, Index count);

struct SvdResult {
  Vector values;  // nonnegative, descending
  Matrix left;    // rows x count
  Matrix right;   // cols x count
};

SvdResult thin_svd(const Matrix& a, Index count);

/// All-pairs geodesic distances. Unreachable pairs hold +infinity.
struct ShortestPaths {
  Matrix distances;
  std::vector<Index> component;
  Index component_count = 0;

  bool connected() const { return component_count == 1; }
  /// Throws if the graph was disconnected.
  DistanceMatrix as_distance_matrix() const;
};

/// Dijkstra from every source. `jobs` > 1 splits sources across threads.
ShortestPaths graph_shortest_paths(const NeighborGraph& g, int jobs = 1);

}  // namespace drens
