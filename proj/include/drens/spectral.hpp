#pragma once

// Linear and global embedders that reduce to one eigendecomposition:
// PCA, classical MDS, kernel PCA and ISOMAP.

#include "drens/embedding.hpp"
#include "drens/numcore.hpp"

namespace drens {

enum class KernelKind {
  rbf,     // exp(-sigma * |x - y|^2)
  linear,  // <x, y>; equals PCA, kept for testing
};

struct SpectralConfig {
  Index output_dims = 2;
  double kpca_sigma = 0.2;
  KernelKind kernel = KernelKind::rbf;
  Index isomap_k = 12;
  int jobs = 1;

  void validate() const;
};

EmbeddingResult fit_pca(const Matrix& x, const SpectralConfig& cfg = {});

/// Classical (Torgerson) scaling of a distance matrix.
EmbeddingResult fit_mds(const DistanceMatrix& d, const SpectralConfig& cfg = {});

/// Double-centered kernel matrix K_c = J K J, J = I - 11'/n.
Matrix centered_kernel(const Matrix& x, KernelKind kind, double sigma);

EmbeddingResult fit_kpca(const Matrix& x, const SpectralConfig& cfg = {});

/// Joins the components of a symmetrized graph by repeatedly adding the
/// shortest edge (by `d`) between two different components. Returns the
/// number of edges added.
Index repair_connectivity(NeighborGraph& g, const DistanceMatrix& d);

EmbeddingResult fit_isomap(const Matrix& x, const SpectralConfig& cfg = {});

}  // namespace drens
