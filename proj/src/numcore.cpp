#include "drens/numcore.hpp"

#include "drens/parallel.hpp"
#include "drens/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

namespace drens {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kResidualTolerance = 1e-9;

std::string index_pair(Index i, Index j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  return os.str();
}

void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
  if (!all_finite(a))
    throw std::invalid_argument(std::string(who) + ": matrix contains non-finite entries");
  const double tol = 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i)
      if (std::abs(a(i, j) - a(j, i)) > tol)
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric at " +
                                    index_pair(i, j));
}

// LU factorization of (T - shift I) for a symmetric tridiagonal T, with
// partial pivoting. Same layout as LAPACK's gttrf.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const Vector& diag, const Vector& off, double shift, double tiny)
      : n_(diag.size()), d_(diag.array() - shift), du_(n_), dl_(n_), du2_(n_), pivot_(n_) {
    for (Index i = 0; i + 1 < n_; ++i) du_[i] = dl_[i] = off[i];
    du2_.setZero();
    for (Index i = 0; i + 1 < n_; ++i) {
      pivot_[i] = false;
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] != 0.0) {
          const double fact = dl_[i] / d_[i];
          dl_[i] = fact;
          d_[i + 1] -= fact * du_[i];
        } else {
          dl_[i] = 0.0;
        }
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        pivot_[i] = true;
      }
    }
    for (Index i = 0; i < n_; ++i)
      if (std::abs(d_[i]) < tiny) d_[i] = d_[i] < 0.0 ? -tiny : tiny;
  }

  void solve(Vector& x) const {
    for (Index i = 0; i + 1 < n_; ++i) {
      if (!pivot_[i]) {
        x[i + 1] -= dl_[i] * x[i];
      } else {
        const double temp = x[i];
        x[i] = x[i + 1];
        x[i + 1] = temp - dl_[i] * x[i];
      }
    }
    x[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) x[n_ - 2] = (x[n_ - 2] - du_[n_ - 2] * x[n_ - 1]) / d_[n_ - 2];
    for (Index i = n_ - 3; i >= 0; --i)
      x[i] = (x[i] - du_[i] * x[i + 1] - du2_[i] * x[i + 2]) / d_[i];
  }

 private:
  Index n_;
  Vector d_, du_, dl_, du2_;
  std::vector<bool> pivot_;
};

// Eigenvectors of the tridiagonal (diag, off) for the ascending `values`,
// by inverse iteration with reorthogonalization inside eigenvalue clusters.
Matrix tridiagonal_inverse_iteration(const Vector& diag, const Vector& off,
                                     const Vector& values) {
  const Index n = diag.size();
  const Index k = values.size();
  double tnorm = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < n) row += std::abs(off[i]);
    tnorm = std::max(tnorm, row);
  }
  if (tnorm == 0.0) tnorm = 1.0;
  const double tiny = kEps * tnorm;
  const double cluster_gap = 1e-3 * tnorm;

  Matrix z(n, k);
  double previous_shift = 0.0;
  for (Index j = 0; j < k; ++j) {
    double shift = values[j];
    if (j > 0) {
      const double separation = 10.0 * kEps * std::max(std::abs(shift), tnorm);
      if (shift - previous_shift < separation) shift = previous_shift + separation;
    }
    previous_shift = shift;
    Index cluster_begin = j;
    while (cluster_begin > 0 && values[j] - values[cluster_begin - 1] < cluster_gap)
      --cluster_begin;

    const ShiftedTridiagonalLU lu(diag, off, shift, tiny);
    Rng rng(derive_seed(0x5eed, static_cast<std::uint64_t>(j)));
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.uniform() - 0.5;

    auto orthonormalize = [&] {
      for (Index c = cluster_begin; c < j; ++c) x -= z.col(c).dot(x) * z.col(c);
      x /= x.norm();
    };
    for (int iter = 0; iter < 5; ++iter) {
      orthonormalize();
      lu.solve(x);
      if (!all_finite(x)) throw std::runtime_error("sym_eigen: inverse iteration diverged");
    }
    orthonormalize();
    z.col(j) = x;
  }
  return z;
}

double max_residual(const Matrix& a, const EigenPairs& pairs) {
  double worst = 0.0;
  for (Index c = 0; c < pairs.values.size(); ++c) {
    const Vector r = a * pairs.vectors.col(c) - pairs.values[c] * pairs.vectors.col(c);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

// Selects `count` pairs from an ascending full solve.
EigenPairs take_from_ascending(const Vector& values, const Matrix& vectors, Index count,
                               Spectrum which) {
  const Index n = values.size();
  EigenPairs out{Vector(count), Matrix(vectors.rows(), count)};
  for (Index c = 0; c < count; ++c) {
    const Index src = which == Spectrum::smallest ? c : n - 1 - c;
    out.values[c] = values[src];
    out.vectors.col(c) = vectors.col(src);
  }
  return out;
}

EigenPairs full_sym_eigen(const Matrix& a, Index count, Spectrum which) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eigen: QL iteration failed");
  return take_from_ascending(solver.eigenvalues(), solver.eigenvectors(), count, which);
}

EigenPairs selective_sym_eigen(const Matrix& a, Index count, Spectrum which) {
  const Index n = a.rows();
  Eigen::Tridiagonalization<Matrix> tri(a);
  const Vector diag = tri.diagonal();
  const Vector off = tri.subDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> values_only;
  values_only.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (values_only.info() != Eigen::Success)
    throw std::runtime_error("sym_eigen: QL iteration failed");
  const Vector& all = values_only.eigenvalues();  // ascending

  // Inverse iteration runs over the selection in ascending order.
  const Index first = which == Spectrum::smallest ? 0 : n - count;
  const Vector selected = all.segment(first, count);
  const Matrix z = tridiagonal_inverse_iteration(diag, off, selected);
  const Matrix v = tri.matrixQ() * z;

  EigenPairs out{Vector(count), Matrix(n, count)};
  for (Index c = 0; c < count; ++c) {
    const Index src = which == Spectrum::smallest ? c : count - 1 - c;
    out.values[c] = selected[src];
    out.vectors.col(c) = v.col(src);
  }
  return out;
}

}  // namespace

DistanceMatrix::DistanceMatrix(Matrix d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols() || d_.rows() < 1)
    throw std::invalid_argument("DistanceMatrix: must be square and non-empty");
  for (Index j = 0; j < d_.cols(); ++j) {
    if (d_(j, j) != 0.0) throw std::invalid_argument("DistanceMatrix: nonzero diagonal");
    for (Index i = 0; i < d_.rows(); ++i) {
      if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0)
        throw std::invalid_argument("DistanceMatrix: negative or non-finite entry at " +
                                    index_pair(i, j));
      if (d_(i, j) != d_(j, i))
        throw std::invalid_argument("DistanceMatrix: not symmetric at " + index_pair(i, j));
    }
  }
}

bool NeighborGraph::has_edge(Index from, Index to) const {
  const auto& list = adjacency[static_cast<std::size_t>(from)];
  return std::any_of(list.begin(), list.end(), [to](const Neighbor& nb) { return nb.index == to; });
}

void NeighborGraph::add_edge(Index i, Index j, double distance) {
  if (i == j) throw std::invalid_argument("NeighborGraph::add_edge: self-loop");
  auto insert = [&](Index from, Index to) {
    auto& list = adjacency[static_cast<std::size_t>(from)];
    auto pos = std::lower_bound(list.begin(), list.end(), to,
                                [](const Neighbor& nb, Index v) { return nb.index < v; });
    if (pos == list.end() || pos->index != to) list.insert(pos, Neighbor{to, distance});
  };
  insert(i, j);
  insert(j, i);
}

std::size_t NeighborGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency) total += list.size();
  return symmetric ? total / 2 : total;
}

NeighborGraph knn_graph(const DistanceMatrix& d, Index k, bool symmetrize) {
  const Index n = d.size();
  if (k < 1 || k >= n) {
    std::ostringstream os;
    os << "knn_graph: k must satisfy 1 <= k <= n-1 (k=" << k << ", n=" << n << ")";
    throw std::invalid_argument(os.str());
  }
  NeighborGraph g;
  g.k = k;
  g.adjacency.resize(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) order[pos++] = j;
    auto closer = [&](Index a, Index b) {
      return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
    auto& list = g.adjacency[static_cast<std::size_t>(i)];
    list.reserve(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) list.push_back({order[c], d(i, order[c])});
  }
  return symmetrize ? symmetrized(g) : g;
}

NeighborGraph symmetrized(const NeighborGraph& g) {
  NeighborGraph out;
  out.k = g.k;
  out.symmetric = true;
  out.adjacency.resize(g.adjacency.size());
  for (Index i = 0; i < g.size(); ++i)
    for (const auto& nb : g.adjacency[static_cast<std::size_t>(i)]) {
      out.adjacency[static_cast<std::size_t>(i)].push_back(nb);
      out.adjacency[static_cast<std::size_t>(nb.index)].push_back({i, nb.distance});
    }
  for (auto& list : out.adjacency) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    list.erase(std::unique(list.begin(), list.end(),
                           [](const Neighbor& a, const Neighbor& b) { return a.index == b.index; }),
               list.end());
  }
  return out;
}

std::vector<Index> connected_components(const NeighborGraph& g) {
  const Index n = g.size();
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.adjacency[static_cast<std::size_t>(u)])
        if (label[static_cast<std::size_t>(nb.index)] < 0) {
          label[static_cast<std::size_t>(nb.index)] = next;
          stack.push_back(nb.index);
        }
    }
    ++next;
  }
  return label;
}

void canonicalize_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index best = 0;
    for (Index r = 1; r < vectors.rows(); ++r)
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c))) best = r;
    if (vectors(best, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

EigenPairs sym_eigen(const Matrix& a, Index count, Spectrum which) {
  require_symmetric(a, "sym_eigen");
  const Index n = a.rows();
  if (count < 1 || count > n) throw std::invalid_argument("sym_eigen: count out of range");

  EigenPairs pairs;
  if (n <= 8 || 4 * count > n) {
    pairs = full_sym_eigen(a, count, which);
  } else {
    pairs = selective_sym_eigen(a, count, which);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (max_residual(a, pairs) > kResidualTolerance * scale) pairs = full_sym_eigen(a, count, which);
  }
  canonicalize_signs(pairs.vectors);
  return pairs;
}

EigenPairs gen_sym_eigen(const Matrix& l, const Vector& d_diagonal, Index count) {
  require_symmetric(l, "gen_sym_eigen");
  if (d_diagonal.size() != l.rows())
    throw std::invalid_argument("gen_sym_eigen: D and L sizes differ");
  for (Index i = 0; i < d_diagonal.size(); ++i)
    if (!(d_diagonal[i] > 0.0) || !std::isfinite(d_diagonal[i])) {
      std::ostringstream os;
      os << "gen_sym_eigen: D must have a strictly positive diagonal (D[" << i
         << "] = " << d_diagonal[i] << ")";
      throw std::invalid_argument(os.str());
    }
  const Vector inv_sqrt = d_diagonal.cwiseSqrt().cwiseInverse();
  Matrix scaled = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  scaled = (0.5 * (scaled + scaled.transpose())).eval();
  EigenPairs pairs = sym_eigen(scaled, count, Spectrum::smallest);
  pairs.vectors = inv_sqrt.asDiagonal() * pairs.vectors;
  canonicalize_signs(pairs.vectors);
  return pairs;
}

EigenPairs gen_sym_eigen(const Matrix& l, const Matrix& d, Index count) {
  if (d.rows() != d.cols()) throw std::invalid_argument("gen_sym_eigen: D must be square");
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i)
      if (i != j && d(i, j) != 0.0) throw std::invalid_argument("gen_sym_eigen: D must be diagonal");
  return gen_sym_eigen(l, Vector(d.diagonal()), count);
}

SvdResult thin_svd(const Matrix& a, Index count) {
  if (count < 1 || count > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("thin_svd: count must be in [1, min(rows, cols)]");
  if (!all_finite(a)) throw std::invalid_argument("thin_svd: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{svd.singularValues().head(count), svd.matrixU().leftCols(count),
                svd.matrixV().leftCols(count)};
  for (Index c = 0; c < count; ++c) {
    Index best = 0;
    for (Index r = 1; r < out.right.rows(); ++r)
      if (std::abs(out.right(r, c)) > std::abs(out.right(best, c))) best = r;
    if (out.right(best, c) < 0.0) {
      out.right.col(c) = -out.right.col(c);
      out.left.col(c) = -out.left.col(c);
    }
  }
  return out;
}

DistanceMatrix ShortestPaths::as_distance_matrix() const {
  if (!connected()) {
    std::ostringstream os;
    os << "shortest paths: graph has " << component_count << " connected components";
    throw std::runtime_error(os.str());
  }
  Matrix d = 0.5 * (distances + distances.transpose());
  d.diagonal().setZero();
  return DistanceMatrix(std::move(d));
}

ShortestPaths graph_shortest_paths(const NeighborGraph& g, int jobs) {
  if (!g.symmetric) throw std::invalid_argument("graph_shortest_paths: graph must be symmetrized");
  const Index n = g.size();
  ShortestPaths out;
  out.distances = Matrix::Constant(n, n, std::numeric_limits<double>::infinity());
  out.component = connected_components(g);
  out.component_count =
      out.component.empty() ? 0 : *std::max_element(out.component.begin(), out.component.end()) + 1;

  // Each source writes only its own column, so threads never share output.
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t source) {
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    auto dist = out.distances.col(static_cast<Index>(source));
    dist[static_cast<Index>(source)] = 0.0;
    heap.emplace(0.0, static_cast<Index>(source));
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (const auto& nb : g.adjacency[static_cast<std::size_t>(u)]) {
        const double alt = du + nb.distance;
        if (alt < dist[nb.index]) {
          dist[nb.index] = alt;
          heap.emplace(alt, nb.index);
        }
      }
    }
  });
  return out;
}

}  // namespace drens
