#include "drens/methods.hpp"

#include <stdexcept>

namespace drens {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::pca: return "pca";
    case Method::mds: return "mds";
    case Method::kpca: return "kpca";
    case Method::isomap: return "isomap";
    case Method::lle: return "lle";
    case Method::hlle: return "hlle";
    case Method::le: return "le";
    case Method::tsne: return "tsne";
  }
  return "pca";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::string method_names() {
  std::string out;
  for (Method m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += to_string(m);
  }
  return out;
}

EmbeddingResult embed(Method method, const Matrix& x, const MethodSettings& settings,
                      std::uint64_t seed) {
  switch (method) {
    case Method::pca: return fit_pca(x, settings.spectral);
    case Method::mds: return fit_mds(pairwise_distances(x), settings.spectral);
    case Method::kpca: return fit_kpca(x, settings.spectral);
    case Method::isomap: return fit_isomap(x, settings.spectral);
    case Method::lle: return fit_lle(x, settings.local);
    case Method::hlle: return fit_hlle(x, settings.local);
    case Method::le: return fit_le(x, settings.local);
    case Method::tsne: {
      LocalConfig cfg = settings.local;
      cfg.seed = seed;
      return fit_tsne(x, cfg);
    }
  }
  throw std::invalid_argument("embed: unknown method");
}

}  // namespace drens
