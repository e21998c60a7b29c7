#include "drens/spectral.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace drens {

namespace {

// Scores from the leading pairs of a centered Gram-type matrix:
// column c = v_c * sqrt(max(lambda_c, 0)).
Matrix scaled_eigenvectors(const EigenPairs& pairs, Index output_dims,
                           std::vector<std::string>& diagnostics, const char* who) {
  const Index n = pairs.vectors.rows();
  Matrix scores = Matrix::Zero(n, output_dims);
  Index clipped = 0;
  for (Index c = 0; c < pairs.values.size(); ++c) {
    const double lambda = pairs.values[c];
    if (lambda <= 0.0) {
      ++clipped;
      continue;
    }
    scores.col(c) = pairs.vectors.col(c) * std::sqrt(lambda);
  }
  if (clipped > 0) {
    std::ostringstream os;
    os << who << ": clipped " << clipped << " non-positive eigenvalue(s) to zero";
    diagnostics.push_back(os.str());
  }
  if (pairs.values.size() < output_dims) {
    std::ostringstream os;
    os << who << ": only " << pairs.values.size() << " components available; zero-padded to "
       << output_dims;
    diagnostics.push_back(os.str());
  }
  return scores;
}

Matrix double_center(Matrix a) {
  const Vector row_mean = a.rowwise().mean();
  const Vector col_mean = a.colwise().mean().transpose();
  const double grand = a.mean();
  a.colwise() -= row_mean;
  a.rowwise() -= col_mean.transpose();
  a.array() += grand;
  return (0.5 * (a + a.transpose())).eval();
}

}  // namespace

void SpectralConfig::validate() const {
  if (output_dims < 1) throw std::invalid_argument("SpectralConfig: output_dims must be >= 1");
  if (!(kpca_sigma > 0.0)) throw std::invalid_argument("SpectralConfig: kpca_sigma must be > 0");
  if (isomap_k < 1) throw std::invalid_argument("SpectralConfig: isomap_k must be >= 1");
}

EmbeddingResult fit_pca(const Matrix& x, const SpectralConfig& cfg) {
  cfg.validate();
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 rows");
  if (!all_finite(x)) throw std::invalid_argument("fit_pca: non-finite input");

  EmbeddingResult res;
  res.method = Method::pca;
  res.parameters["output_dims"] = static_cast<double>(cfg.output_dims);

  const Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = (0.5 * (cov + cov.transpose())).eval();

  const Index count = std::min(cfg.output_dims, p);
  const EigenPairs pairs = sym_eigen(cov, count, Spectrum::largest);
  res.eigenvalues = pairs.values;
  res.scores = Matrix::Zero(n, cfg.output_dims);

  const double top = std::max(pairs.values[0], 0.0);
  Index dropped = 0;
  for (Index c = 0; c < count; ++c) {
    if (pairs.values[c] <= 1e-12 * top) {
      ++dropped;
      continue;
    }
    res.scores.col(c) = centered * pairs.vectors.col(c);
  }
  if (dropped > 0 || count < cfg.output_dims) {
    std::ostringstream os;
    os << "pca: requested " << cfg.output_dims << " components but data rank is "
       << (count - dropped) << "; trailing columns zero-padded";
    res.diagnostics.push_back(os.str());
  }
  return res;
}

EmbeddingResult fit_mds(const DistanceMatrix& d, const SpectralConfig& cfg) {
  cfg.validate();
  const Index n = d.size();
  if (d.matrix().cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("fit_mds: all distances are zero");

  EmbeddingResult res;
  res.method = Method::mds;
  res.parameters["output_dims"] = static_cast<double>(cfg.output_dims);

  const Matrix b = -0.5 * double_center(d.matrix().array().square().matrix());
  const EigenPairs pairs = sym_eigen(b, std::min(cfg.output_dims, n), Spectrum::largest);
  res.eigenvalues = pairs.values;
  res.scores = scaled_eigenvectors(pairs, cfg.output_dims, res.diagnostics, "mds");
  return res;
}

Matrix centered_kernel(const Matrix& x, KernelKind kind, double sigma) {
  const Index n = x.rows();
  Matrix k(n, n);
  if (kind == KernelKind::linear) {
    k = x * x.transpose();
  } else {
    const DistanceMatrix dist = pairwise_distances(x);
    k = (-sigma * dist.matrix().array().square()).exp().matrix();
  }
  return double_center(std::move(k));
}

EmbeddingResult fit_kpca(const Matrix& x, const SpectralConfig& cfg) {
  cfg.validate();
  const Index n = x.rows();
  if (n < 2) throw std::invalid_argument("fit_kpca: need at least 2 rows");
  if (!all_finite(x)) throw std::invalid_argument("fit_kpca: non-finite input");

  EmbeddingResult res;
  res.method = Method::kpca;
  res.parameters["output_dims"] = static_cast<double>(cfg.output_dims);
  res.parameters["sigma"] = cfg.kpca_sigma;

  const Matrix kc = centered_kernel(x, cfg.kernel, cfg.kpca_sigma);
  const EigenPairs pairs = sym_eigen(kc, std::min(cfg.output_dims, n), Spectrum::largest);
  res.eigenvalues = pairs.values;
  res.scores = scaled_eigenvectors(pairs, cfg.output_dims, res.diagnostics, "kpca");
  return res;
}

Index repair_connectivity(NeighborGraph& g, const DistanceMatrix& d) {
  if (!g.symmetric) throw std::invalid_argument("repair_connectivity: graph must be symmetrized");
  const Index n = g.size();
  Index added = 0;
  for (;;) {
    const std::vector<Index> label = connected_components(g);
    if (*std::max_element(label.begin(), label.end()) == 0) break;
    double best = std::numeric_limits<double>::infinity();
    Index bi = -1, bj = -1;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (label[static_cast<std::size_t>(i)] != label[static_cast<std::size_t>(j)] &&
            d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
    g.add_edge(bi, bj, best);
    ++added;
  }
  return added;
}

EmbeddingResult fit_isomap(const Matrix& x, const SpectralConfig& cfg) {
  cfg.validate();
  const Index n = x.rows();
  if (n <= cfg.isomap_k) {
    std::ostringstream os;
    os << "fit_isomap: need more rows than neighbours (n=" << n << ", k=" << cfg.isomap_k << ")";
    throw std::invalid_argument(os.str());
  }
  const DistanceMatrix d = pairwise_distances(x);
  NeighborGraph g = knn_graph(d, cfg.isomap_k, true);
  const Index bridges = repair_connectivity(g, d);
  const ShortestPaths paths = graph_shortest_paths(g, cfg.jobs);

  EmbeddingResult res = fit_mds(paths.as_distance_matrix(), cfg);
  res.method = Method::isomap;
  res.parameters["k"] = static_cast<double>(cfg.isomap_k);
  res.parameters["bridges_added"] = static_cast<double>(bridges);
  for (auto& msg : res.diagnostics) msg.replace(0, 3, "isomap");
  if (bridges > 0) {
    std::ostringstream os;
    os << "isomap: neighbour graph was disconnected; added " << bridges << " bridge edge(s)";
    res.diagnostics.push_back(os.str());
  }
  return res;
}

}  // namespace drens
