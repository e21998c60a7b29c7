#pragma once

#include "drens/embedding.hpp"
#include "drens/local.hpp"
#include "drens/spectral.hpp"

#include <cstdint>

namespace drens {

/// Per-method settings; defaults are the reference parameter table
/// (k = 12 neighbours, rbf kpar = 0.2, perplexity 80, two output dimensions).
struct MethodSettings {
  SpectralConfig spectral;
  LocalConfig local;
};

/// Fits `method` on the rows of `x`. `seed` feeds the stochastic methods.
EmbeddingResult embed(Method method, const Matrix& x, const MethodSettings& settings,
                      std::uint64_t seed);

}  // namespace drens
