#pragma once

// Random-forest classifier for binary outcomes: Gini splits, bootstrap
// aggregation, majority vote and impurity importance.

#include "drens/numcore.hpp"
#include "drens/preprocess.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drens {

/// Defaults follow the common classification forest settings: 500 trees,
/// mtry = floor(sqrt(p)), minimum node size 1, n draws with replacement.
struct ForestParams {
  int n_trees = 500;
  int mtry = 0;  // 0 selects floor(sqrt(p))
  int min_node_size = 1;
  bool bootstrap = true;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  std::array<int, 2> counts{0, 0};  // in-bag class counts reaching the node
  double decrease = 0.0;  // weighted Gini decrease of the split

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(const double* row, Index stride) const;
};

struct ForestModel {
  ForestParams params;
  Index features = 0;
  int mtry = 0;
  std::vector<DecisionTree> trees;
  Vector total_decrease;  // per feature, summed over trees
};

ForestModel rf_train(const Matrix& x, const Labels& y, const ForestParams& params);

/// Majority vote over trees; ties go to class 0.
Labels rf_predict(const ForestModel& model, const Matrix& x);

struct FeatureImportance {
  Vector values;  // sums to 1 unless every tree is a single leaf
  std::optional<std::string> diagnostic;
};

/// Mean Gini decrease per feature, normalized to sum to 1.
FeatureImportance rf_importance(const ForestModel& model);

double accuracy(const Labels& predicted, const Labels& truth);

/// Versioned JSON form ("drens-forest", version 1).
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(std::string_view text);

}  // namespace drens
