#include "drens/local.hpp"

#include "drens/parallel.hpp"
#include "drens/rng.hpp"
#include "drens/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace drens {

namespace {

void require_rows(const Matrix& x, Index minimum, const char* who, const char* why) {
  if (x.rows() < minimum) {
    std::ostringstream os;
    os << who << ": " << why << " (n=" << x.rows() << ", need " << minimum << ")";
    throw std::invalid_argument(os.str());
  }
  if (!all_finite(x)) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

// Embedding from the m+1 smallest pairs of `a` (with D-weighting when `d`
// is given): the constant direction is projected out and the remaining
// m-dimensional span is re-diagonalized (Rayleigh-Ritz). Dropping the first
// vector alone is not enough when the null space is degenerate, e.g. for a
// graph whose bridge weights underflow.
std::pair<Matrix, Vector> without_constant(const EigenPairs& pairs, const Matrix& a, const Vector* d,
                                           Index output_dims) {
  const Index n = pairs.vectors.rows();
  const Vector weight = d ? *d : Vector::Ones(n);
  const Vector c = Vector::Ones(n) / std::sqrt(weight.sum());
  Matrix v = pairs.vectors;
  v -= c * (c.cwiseProduct(weight).transpose() * v);

  const Matrix b = v.transpose() * weight.asDiagonal() * v;
  Eigen::SelfAdjointEigenSolver<Matrix> metric(0.5 * (b + b.transpose()));
  // Keep the `output_dims` best-conditioned directions of the projected span.
  const Matrix s = metric.eigenvectors().rightCols(output_dims) *
                   metric.eigenvalues().tail(output_dims).cwiseSqrt().cwiseInverse().asDiagonal();
  const Matrix basis = v * s;
  const Matrix reduced = basis.transpose() * a * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> ritz(0.5 * (reduced + reduced.transpose()));
  Matrix y = basis * ritz.eigenvectors();
  canonicalize_signs(y);
  return {y, ritz.eigenvalues()};
}

// Modified Gram-Schmidt; columns that vanish after projection are dropped.
// Returns the surviving orthonormal columns and their original indices.
std::pair<Matrix, std::vector<Index>> gram_schmidt(const Matrix& a) {
  Matrix q(a.rows(), a.cols());
  std::vector<Index> kept;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Index c = 0; c < a.cols(); ++c) {
    Vector v = a.col(c);
    for (std::size_t j = 0; j < kept.size(); ++j) v -= q.col(static_cast<Index>(j)).dot(v) * q.col(static_cast<Index>(j));
    const double norm = v.norm();
    if (norm <= 1e-10 * scale) continue;
    q.col(static_cast<Index>(kept.size())) = v / norm;
    kept.push_back(c);
  }
  return {q.leftCols(static_cast<Index>(kept.size())), kept};
}

}  // namespace

void LocalConfig::validate() const {
  if (output_dims < 1) throw std::invalid_argument("LocalConfig: output_dims must be >= 1");
  if (k < 1) throw std::invalid_argument("LocalConfig: k must be >= 1");
  if (!(lle_reg_tol > 0.0)) throw std::invalid_argument("LocalConfig: lle_reg_tol must be > 0");
  if (le_heat_t && !(*le_heat_t > 0.0))
    throw std::invalid_argument("LocalConfig: le_heat_t must be > 0");
  if (!(tsne_perplexity > 0.0))
    throw std::invalid_argument("LocalConfig: tsne_perplexity must be > 0");
  if (tsne_iters < 1) throw std::invalid_argument("LocalConfig: tsne_iters must be >= 1");
  if (!(tsne_learning_rate > 0.0))
    throw std::invalid_argument("LocalConfig: tsne_learning_rate must be > 0");
  if (tsne_early_exaggeration < 1.0)
    throw std::invalid_argument("LocalConfig: tsne_early_exaggeration must be >= 1");
}

// ---------------------------------------------------------------- LLE

LocalWeights lle_weights(const Matrix& x, Index k, double reg_tol) {
  const Index n = x.rows();
  const Index dims = x.cols();
  const NeighborGraph knn = knn_graph(pairwise_distances(x), k, false);

  LocalWeights out;
  out.neighbors.resize(static_cast<std::size_t>(n));
  out.weights.resize(static_cast<std::size_t>(n));
  const Vector ones = Vector::Ones(k);
  for (Index i = 0; i < n; ++i) {
    auto& nbrs = out.neighbors[static_cast<std::size_t>(i)];
    for (const auto& nb : knn.adjacency[static_cast<std::size_t>(i)]) nbrs.push_back(nb.index);

    Matrix z(k, dims);
    for (Index a = 0; a < k; ++a) z.row(a) = x.row(nbrs[static_cast<std::size_t>(a)]) - x.row(i);
    Matrix gram = z * z.transpose();
    const double trace = gram.trace();

    Vector w;
    if (trace == 0.0) {
      // Every neighbour coincides with the point: the regularized solution
      // tends to uniform weights as the Gram matrix vanishes.
      w = ones / static_cast<double>(k);
      ++out.degenerate;
    } else {
      bool regularize = k > dims;
      if (!regularize) {
        // k <= dims: an exact reconstruction exists whenever the Gram matrix
        // is singular. Take the minimum-norm one, the projection of the ones
        // vector onto the null space.
        Eigen::SelfAdjointEigenSolver<Matrix> spectrum(gram);
        const Vector& ev = spectrum.eigenvalues();
        Index null_dims = 0;
        while (null_dims < k && ev[null_dims] <= 1e-10 * ev[k - 1]) ++null_dims;
        if (null_dims > 0) {
          const Matrix basis = spectrum.eigenvectors().leftCols(null_dims);
          w = basis * (basis.transpose() * ones);
          if (std::abs(w.sum()) <= 1e-8 * std::sqrt(static_cast<double>(k))) regularize = true;
        } else {
          w = gram.ldlt().solve(ones);
        }
      }
      if (regularize) {
        gram.diagonal().array() += reg_tol * trace;
        ++out.regularized;
        w = gram.ldlt().solve(ones);
      }
      const double sum = w.sum();
      if (!all_finite(w) || sum == 0.0) {
        std::ostringstream os;
        os << "fit_lle: singular local Gram system at point " << i;
        throw std::runtime_error(os.str());
      }
      w /= sum;
    }
    out.weights[static_cast<std::size_t>(i)] = std::move(w);
  }
  return out;
}

Matrix lle_cost_matrix(const LocalWeights& w, Index n) {
  Matrix m = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& nbrs = w.neighbors[static_cast<std::size_t>(i)];
    const Vector& wi = w.weights[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      const Index ja = nbrs[a];
      m(i, ja) -= wi[static_cast<Index>(a)];
      m(ja, i) -= wi[static_cast<Index>(a)];
      for (std::size_t b = 0; b < nbrs.size(); ++b)
        m(ja, nbrs[b]) += wi[static_cast<Index>(a)] * wi[static_cast<Index>(b)];
    }
  }
  return m;
}

EmbeddingResult fit_lle(const Matrix& x, const LocalConfig& cfg) {
  cfg.validate();
  require_rows(x, cfg.k + 2, "fit_lle", "need at least k+2 rows");
  const Index n = x.rows();

  EmbeddingResult res;
  res.method = Method::lle;
  res.parameters["k"] = static_cast<double>(cfg.k);
  res.parameters["reg_tol"] = cfg.lle_reg_tol;
  res.parameters["output_dims"] = static_cast<double>(cfg.output_dims);

  const LocalWeights w = lle_weights(x, cfg.k, cfg.lle_reg_tol);
  const Matrix cost = lle_cost_matrix(w, n);
  const EigenPairs pairs = sym_eigen(cost, cfg.output_dims + 1, Spectrum::smallest);
  std::tie(res.scores, res.eigenvalues) = without_constant(pairs, cost, nullptr, cfg.output_dims);
  if (w.degenerate > 0) {
    std::ostringstream os;
    os << "lle: " << w.degenerate << " neighbourhood(s) collapsed onto duplicate points; uniform weights used";
    res.diagnostics.push_back(os.str());
  }
  res.parameters["regularized_neighbourhoods"] = static_cast<double>(w.regularized);
  return res;
}

// ---------------------------------------------------------------- HLLE

Matrix hlle_hessian(const Matrix& x, Index k, Index output_dims) {
  const Index n = x.rows();
  const Index m = output_dims;
  const Index quadratic = m * (m + 1) / 2;
  if (k < m + quadratic) {
    std::ostringstream os;
    os << "fit_hlle: k=" << k << " is too small for the quadratic basis; need k >= "
       << m + quadratic;
    throw std::invalid_argument(os.str());
  }
  if (k >= n) throw std::invalid_argument("fit_hlle: k must be smaller than n");
  if (x.cols() < m) throw std::invalid_argument("fit_hlle: input has fewer columns than output_dims");

  const NeighborGraph knn = knn_graph(pairwise_distances(x), k, false);
  const Index size = k + 1;  // the point and its k neighbours

  Matrix h = Matrix::Zero(n, n);
  std::vector<Index> hood(static_cast<std::size_t>(size));
  for (Index i = 0; i < n; ++i) {
    hood[0] = i;
    for (Index a = 0; a < k; ++a)
      hood[static_cast<std::size_t>(a + 1)] = knn.adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)].index;

    Matrix local(size, x.cols());
    for (Index a = 0; a < size; ++a) local.row(a) = x.row(hood[static_cast<std::size_t>(a)]);
    local.rowwise() -= local.colwise().mean();

    Eigen::JacobiSVD<Matrix> svd(local, Eigen::ComputeThinU);
    const Matrix tangent = svd.matrixU().leftCols(m);

    Matrix basis(size, 1 + m + quadratic);
    basis.col(0).setOnes();
    basis.middleCols(1, m) = tangent;
    Index c = 1 + m;
    for (Index a = 0; a < m; ++a)
      for (Index b = a; b < m; ++b) basis.col(c++) = tangent.col(a).cwiseProduct(tangent.col(b));

    const auto [q, kept] = gram_schmidt(basis);
    std::vector<Index> hessian_cols;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (kept[j] > m) hessian_cols.push_back(static_cast<Index>(j));
    if (hessian_cols.empty()) continue;

    Matrix estimator(size, static_cast<Index>(hessian_cols.size()));
    for (std::size_t j = 0; j < hessian_cols.size(); ++j) estimator.col(static_cast<Index>(j)) = q.col(hessian_cols[j]);
    const Matrix local_gram = estimator * estimator.transpose();
    for (Index a = 0; a < size; ++a)
      for (Index b = 0; b < size; ++b)
        h(hood[static_cast<std::size_t>(a)], hood[static_cast<std::size_t>(b)]) += local_gram(a, b);
  }
  return (0.5 * (h + h.transpose())).eval();
}

EmbeddingResult fit_hlle(const Matrix& x, const LocalConfig& cfg) {
  cfg.validate();
  require_rows(x, cfg.k + 1, "fit_hlle", "need more rows than neighbours");
  const Index m = cfg.output_dims;

  EmbeddingResult res;
  res.method = Method::hlle;
  res.parameters["k"] = static_cast<double>(cfg.k);
  res.parameters["output_dims"] = static_cast<double>(m);

  const Matrix h = hlle_hessian(x, cfg.k, m);
  const Index wanted = std::min<Index>(m + 2, x.rows());
  const EigenPairs pairs = sym_eigen(h, wanted, Spectrum::smallest);
  if (wanted == m + 2 && pairs.values[m + 1] - pairs.values[m] < 1e-12) {
    std::ostringstream os;
    os << "hlle: embedding eigenvalues are not separated from the next one (gap "
       << pairs.values[m + 1] - pairs.values[m] << ")";
    res.diagnostics.push_back(os.str());
  }

  // Symmetric orthonormalization Y (Y'Y)^{-1/2}.
  EigenPairs leading{pairs.values.head(m + 1), pairs.vectors.leftCols(m + 1)};
  Matrix y;
  std::tie(y, res.eigenvalues) = without_constant(leading, h, nullptr, m);
  Eigen::SelfAdjointEigenSolver<Matrix> gram(y.transpose() * y);
  const Matrix inv_sqrt = gram.eigenvectors() *
                          gram.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          gram.eigenvectors().transpose();
  res.scores = y * inv_sqrt;
  canonicalize_signs(res.scores);
  return res;
}

// ---------------------------------------------------------------- LE

GraphLaplacian heat_kernel_laplacian(const Matrix& x, const LocalConfig& cfg) {
  const Index n = x.rows();
  const DistanceMatrix d = pairwise_distances(x);
  NeighborGraph g = knn_graph(d, cfg.k, true);

  GraphLaplacian out;
  out.bridges = repair_connectivity(g, d);

  if (cfg.le_heat_t) {
    out.heat_t = *cfg.le_heat_t;
  } else {
    double total = 0.0;
    std::size_t edges = 0;
    for (const auto& list : g.adjacency)
      for (const auto& nb : list) {
        total += nb.distance * nb.distance;
        ++edges;
      }
    out.heat_t = edges > 0 && total > 0.0 ? total / static_cast<double>(edges) : 1.0;
  }

  out.weights = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (const auto& nb : g.adjacency[static_cast<std::size_t>(i)])
      out.weights(i, nb.index) = cfg.le_binary_weights
                                     ? 1.0
                                     : std::max(std::exp(-nb.distance * nb.distance / out.heat_t),
                                                std::numeric_limits<double>::min());
  out.degree = out.weights.rowwise().sum();
  out.laplacian = -out.weights;
  out.laplacian.diagonal() += out.degree;
  return out;
}

EmbeddingResult fit_le(const Matrix& x, const LocalConfig& cfg) {
  cfg.validate();
  require_rows(x, cfg.k + 2, "fit_le", "need more rows than neighbours");

  EmbeddingResult res;
  res.method = Method::le;
  res.parameters["k"] = static_cast<double>(cfg.k);
  res.parameters["output_dims"] = static_cast<double>(cfg.output_dims);

  const GraphLaplacian lap = heat_kernel_laplacian(x, cfg);
  res.parameters["heat_t"] = cfg.le_binary_weights ? 0.0 : lap.heat_t;
  res.parameters["bridges_added"] = static_cast<double>(lap.bridges);
  if (lap.bridges > 0) {
    std::ostringstream os;
    os << "le: neighbour graph was disconnected; added " << lap.bridges << " bridge edge(s)";
    res.diagnostics.push_back(os.str());
  }
  const EigenPairs pairs = gen_sym_eigen(lap.laplacian, lap.degree, cfg.output_dims + 1);
  std::tie(res.scores, res.eigenvalues) = without_constant(pairs, lap.laplacian, &lap.degree, cfg.output_dims);
  return res;
}

// ---------------------------------------------------------------- t-SNE

TsneAffinities tsne_affinities(const Matrix& x, double perplexity) {
  const Index n = x.rows();
  if (!(3.0 * perplexity < static_cast<double>(n))) {
    std::ostringstream os;
    os << "fit_tsne: perplexity " << perplexity << " requires n > 3 * perplexity = "
       << 3.0 * perplexity << " (n=" << n << ")";
    throw std::invalid_argument(os.str());
  }
  const Matrix sq = pairwise_distances(x).matrix().array().square().matrix();
  const double target = std::log(perplexity);

  TsneAffinities out;
  out.conditional = Matrix::Zero(n, n);
  out.beta = Vector::Ones(n);
  Vector p(n);
  for (Index i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j)
      if (j != i) nearest = std::min(nearest, sq(j, i));

    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) {
          p[j] = 0.0;
          continue;
        }
        const double shifted = sq(j, i) - nearest;
        p[j] = std::exp(-beta * shifted);
        sum += p[j];
        weighted += shifted * p[j];
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      p /= sum;
      if (std::abs(std::exp(entropy) - perplexity) < 1e-5) {
        converged = true;
        break;
      }
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    if (!converged) ++out.unconverged;
    out.beta[i] = beta;
    out.conditional.row(i) = p.transpose();
  }
  out.joint = (out.conditional + out.conditional.transpose()) / (2.0 * static_cast<double>(n));
  return out;
}

double tsne_kl_divergence(const Matrix& joint, const Matrix& y) {
  const Index n = y.rows();
  Matrix num = Matrix::Zero(n, n);
  double z = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) {
        num(i, j) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
        z += num(i, j);
      }
  double kl = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && joint(i, j) > 0.0) kl += joint(i, j) * std::log(joint(i, j) * z / num(i, j));
  return kl;
}

EmbeddingResult fit_tsne(const Matrix& x, const LocalConfig& cfg) {
  cfg.validate();
  require_rows(x, 2, "fit_tsne", "need at least 2 rows");
  const Index n = x.rows();
  const Index m = cfg.output_dims;

  EmbeddingResult res;
  res.method = Method::tsne;
  res.parameters["perplexity"] = cfg.tsne_perplexity;
  res.parameters["iterations"] = cfg.tsne_iters;
  res.parameters["learning_rate"] = cfg.tsne_learning_rate;
  res.parameters["early_exaggeration"] = cfg.tsne_early_exaggeration;
  res.parameters["output_dims"] = static_cast<double>(m);
  res.parameters["seed"] = static_cast<double>(cfg.seed);

  const TsneAffinities aff = tsne_affinities(x, cfg.tsne_perplexity);
  if (aff.unconverged > 0) {
    std::ostringstream os;
    os << "tsne: bandwidth search did not reach the target perplexity for " << aff.unconverged
       << " point(s)";
    res.diagnostics.push_back(os.str());
  }
  const Matrix& p = aff.joint;

  // Row-major working copies: y[i * m + c].
  std::vector<double> y(static_cast<std::size_t>(n * m));
  Rng rng(cfg.seed);
  for (auto& v : y) v = rng.normal(0.0, 1e-2);  // variance 1e-4

  auto to_matrix = [&] {
    Matrix out(n, m);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < m; ++c) out(i, c) = y[static_cast<std::size_t>(i * m + c)];
    return out;
  };
  res.parameters["kl_initial"] = tsne_kl_divergence(p, to_matrix());

  std::vector<double> grad(y.size()), attract(y.size()), repulse(y.size());
  std::vector<double> update(y.size(), 0.0), gains(y.size(), 1.0);
  std::vector<double> diff(static_cast<std::size_t>(m));
  for (int iter = 0; iter < cfg.tsne_iters; ++iter) {
    const double exaggeration = iter < cfg.tsne_exaggeration_iters ? cfg.tsne_early_exaggeration : 1.0;
    const double momentum = iter < cfg.tsne_momentum_switch ? 0.5 : 0.8;

    std::fill(attract.begin(), attract.end(), 0.0);
    std::fill(repulse.begin(), repulse.end(), 0.0);
    double z = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double* yi = &y[static_cast<std::size_t>(i * m)];
      const double* pcol = p.col(i).data();
      for (Index j = i + 1; j < n; ++j) {
        const double* yj = &y[static_cast<std::size_t>(j * m)];
        double dist = 0.0;
        for (Index c = 0; c < m; ++c) {
          diff[static_cast<std::size_t>(c)] = yi[c] - yj[c];
          dist += diff[static_cast<std::size_t>(c)] * diff[static_cast<std::size_t>(c)];
        }
        const double num = 1.0 / (1.0 + dist);
        z += 2.0 * num;
        const double a = pcol[j] * num;
        const double r = num * num;
        for (Index c = 0; c < m; ++c) {
          const double dc = diff[static_cast<std::size_t>(c)];
          attract[static_cast<std::size_t>(i * m + c)] += a * dc;
          attract[static_cast<std::size_t>(j * m + c)] -= a * dc;
          repulse[static_cast<std::size_t>(i * m + c)] += r * dc;
          repulse[static_cast<std::size_t>(j * m + c)] -= r * dc;
        }
      }
    }
    for (std::size_t t = 0; t < y.size(); ++t)
      grad[t] = 4.0 * (exaggeration * attract[t] - repulse[t] / z);

    for (std::size_t t = 0; t < y.size(); ++t) {
      gains[t] = (grad[t] > 0.0) != (update[t] > 0.0) ? gains[t] + 0.2 : gains[t] * 0.8;
      gains[t] = std::max(gains[t], 0.01);
      update[t] = momentum * update[t] - cfg.tsne_learning_rate * gains[t] * grad[t];
      y[t] += update[t];
    }
    for (Index c = 0; c < m; ++c) {
      double mean = 0.0;
      for (Index i = 0; i < n; ++i) mean += y[static_cast<std::size_t>(i * m + c)];
      mean /= static_cast<double>(n);
      for (Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i * m + c)] -= mean;
    }
  }

  res.scores = to_matrix();
  res.parameters["kl_final"] = tsne_kl_divergence(p, res.scores);
  return res;
}

}  // namespace drens
