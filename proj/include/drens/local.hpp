#pragma once

// Local nonlinear embedders: LLE, Hessian LLE, Laplacian eigenmaps and exact
// (O(n^2) per iteration) t-SNE.

#include "drens/embedding.hpp"
#include "drens/numcore.hpp"

#include <cstdint>
#include <optional>

namespace drens {

struct LocalConfig {
  Index output_dims = 2;
  Index k = 12;
  /// Tikhonov term is lle_reg_tol * trace(local Gram).
  double lle_reg_tol = 1e-3;
  /// Heat-kernel width; unset means the mean squared neighbour distance.
  std::optional<double> le_heat_t;
  bool le_binary_weights = false;
  double tsne_perplexity = 80.0;
  int tsne_iters = 1000;
  double tsne_learning_rate = 200.0;
  double tsne_early_exaggeration = 12.0;
  int tsne_exaggeration_iters = 250;
  int tsne_momentum_switch = 250;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Sparse reconstruction weights: row i mixes `neighbors[i]` with `weights[i]`.
struct LocalWeights {
  std::vector<std::vector<Index>> neighbors;
  std::vector<Vector> weights;
  Index regularized = 0;  // neighbourhoods that needed the Tikhonov term
  Index degenerate = 0;   // neighbourhoods collapsed onto the point itself
};

LocalWeights lle_weights(const Matrix& x, Index k, double reg_tol);

/// M = (I - W)'(I - W), assembled from the sparse rows.
Matrix lle_cost_matrix(const LocalWeights& w, Index n);

EmbeddingResult fit_lle(const Matrix& x, const LocalConfig& cfg = {});

/// Accumulated Hessian estimator H = sum over neighbourhoods of P'P.
Matrix hlle_hessian(const Matrix& x, Index k, Index output_dims);

EmbeddingResult fit_hlle(const Matrix& x, const LocalConfig& cfg = {});

struct GraphLaplacian {
  Matrix weights;  // symmetric W
  Vector degree;   // row sums of W
  Matrix laplacian;  // D - W
  double heat_t = 0.0;
  Index bridges = 0;
};

GraphLaplacian heat_kernel_laplacian(const Matrix& x, const LocalConfig& cfg);

EmbeddingResult fit_le(const Matrix& x, const LocalConfig& cfg = {});

struct TsneAffinities {
  Matrix conditional;  // row i holds p_{j|i}
  Matrix joint;        // (p_{j|i} + p_{i|j}) / 2n
  Vector beta;         // per-point Gaussian precision 1 / (2 sigma^2)
  Index unconverged = 0;
};

TsneAffinities tsne_affinities(const Matrix& x, double perplexity);

/// KL(P || Q) for a joint P and the Student-t affinities of `y`.
double tsne_kl_divergence(const Matrix& joint, const Matrix& y);

EmbeddingResult fit_tsne(const Matrix& x, const LocalConfig& cfg = {});

}  // namespace drens
