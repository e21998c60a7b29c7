#pragma once

#include "drens/embedding.hpp"
#include "drens/preprocess.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drens {

enum class EnsembleKind { large, small, custom };

struct EnsembleSelection {
  EnsembleKind kind = EnsembleKind::large;
  std::vector<Method> methods;  // custom selections only

  static EnsembleSelection large() { return {EnsembleKind::large, {}}; }
  static EnsembleSelection small() { return {EnsembleKind::small, {}}; }
  static EnsembleSelection custom(std::vector<Method> methods) {
    return {EnsembleKind::custom, std::move(methods)};
  }
  /// Selected methods in canonical order.
  std::vector<Method> resolved() const;
  std::string name() const;
};

struct EnsembleColumn {
  Method method;
  int component;  // 1 or 2
};

struct EnsembleMatrix {
  Matrix x;
  std::vector<EnsembleColumn> columns;
  Labels y;
};

/// Concatenates the first two score columns of each selected method.
EnsembleMatrix build_ensemble(std::span<const EmbeddingResult> results,
                              const EnsembleSelection& selection, const Labels& y);

/// CSV with a "method_component" header row and a trailing outcome column.
void write_ensemble_csv(std::ostream& os, const EnsembleMatrix& e);

}  // namespace drens
