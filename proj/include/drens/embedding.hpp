#pragma once

#include "drens/numcore.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drens {

/// The eight embedders, in canonical ensemble order.
enum class Method { pca, mds, kpca, isomap, lle, hlle, le, tsne };

inline constexpr std::array<Method, 8> kAllMethods = {
    Method::pca, Method::mds, Method::kpca, Method::isomap,
    Method::lle, Method::hlle, Method::le, Method::tsne};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
/// "pca, mds, ..." for error messages.
std::string method_names();

struct EmbeddingResult {
  Method method = Method::pca;
  Matrix scores;       // n x m
  Vector eigenvalues;  // spectrum entries behind the scores, when applicable
  std::map<std::string, double> parameters;
  std::vector<std::string> diagnostics;

  Index rows() const { return scores.rows(); }
  Index dims() const { return scores.cols(); }
};

}  // namespace drens
