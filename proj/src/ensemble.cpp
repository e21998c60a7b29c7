#include "drens/ensemble.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drens {

std::vector<Method> EnsembleSelection::resolved() const {
  std::vector<Method> wanted;
  switch (kind) {
    case EnsembleKind::large: wanted.assign(kAllMethods.begin(), kAllMethods.end()); break;
    case EnsembleKind::small: wanted = {Method::pca, Method::mds, Method::tsne}; break;
    case EnsembleKind::custom: wanted = methods; break;
  }
  std::vector<Method> out;
  for (Method m : kAllMethods)
    if (std::find(wanted.begin(), wanted.end(), m) != wanted.end()) out.push_back(m);
  return out;
}

std::string EnsembleSelection::name() const {
  switch (kind) {
    case EnsembleKind::large: return "large_ensemble";
    case EnsembleKind::small: return "small_ensemble";
    case EnsembleKind::custom: break;
  }
  std::string out = "ensemble";
  for (Method m : resolved()) out += "_" + std::string(to_string(m));
  return out;
}

EnsembleMatrix build_ensemble(std::span<const EmbeddingResult> results,
                              const EnsembleSelection& selection, const Labels& y) {
  const std::vector<Method> methods = selection.resolved();
  if (methods.empty()) throw std::invalid_argument("build_ensemble: empty selection");

  std::vector<const EmbeddingResult*> chosen;
  for (Method m : methods) {
    auto it = std::find_if(results.begin(), results.end(),
                           [m](const EmbeddingResult& r) { return r.method == m; });
    if (it == results.end())
      throw std::invalid_argument("build_ensemble: required method '" + std::string(to_string(m)) +
                                  "' is missing");
    chosen.push_back(&*it);
  }
  const Index n = static_cast<Index>(y.size());
  for (const auto* r : chosen) {
    if (r->rows() != n) {
      std::ostringstream os;
      os << "build_ensemble: '" << to_string(r->method) << "' has " << r->rows()
         << " rows, expected " << n;
      throw std::invalid_argument(os.str());
    }
    if (r->dims() < 2)
      throw std::invalid_argument("build_ensemble: '" + std::string(to_string(r->method)) +
                                  "' has fewer than 2 components");
  }

  EnsembleMatrix e;
  e.x.resize(n, 2 * static_cast<Index>(chosen.size()));
  e.y = y;
  Index c = 0;
  for (const auto* r : chosen)
    for (int comp = 0; comp < 2; ++comp) {
      e.x.col(c++) = r->scores.col(comp);
      e.columns.push_back({r->method, comp + 1});
    }
  return e;
}

void write_ensemble_csv(std::ostream& os, const EnsembleMatrix& e) {
  for (const auto& col : e.columns) os << to_string(col.method) << '_' << col.component << ',';
  os << "outcome\n";
  for (Index r = 0; r < e.x.rows(); ++r) {
    for (Index c = 0; c < e.x.cols(); ++c) os << format_number(e.x(r, c)) << ',';
    os << e.y[static_cast<std::size_t>(r)] << '\n';
  }
}

}  // namespace drens
