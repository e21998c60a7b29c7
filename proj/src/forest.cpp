#include "drens/forest.hpp"

#include "drens/parallel.hpp"
#include "drens/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drens {

namespace {

struct SortItem {
  double value;
  int label;
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Labels& y, int mtry, int min_node_size, Rng& rng)
      : x_(x), y_(y), mtry_(mtry), min_node_size_(min_node_size), rng_(rng),
        features_(static_cast<std::size_t>(x.cols())) {}

  DecisionTree grow(std::vector<Index> samples) {
    DecisionTree tree;
    struct Pending {
      int node;
      std::size_t begin, end;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, samples.size()}};
    while (!stack.empty()) {
      const Pending task = stack.back();
      stack.pop_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node)];
      for (std::size_t s = task.begin; s < task.end; ++s) ++node.counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(samples[s])])];
      const std::size_t size = task.end - task.begin;
      if (node.counts[0] == 0 || node.counts[1] == 0 || size <= static_cast<std::size_t>(min_node_size_))
        continue;

      const Split split = best_split(samples, task.begin, task.end, node.counts);
      if (split.feature < 0) continue;

      const double* column = x_.col(split.feature).data();
      auto mid = std::partition(samples.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                samples.begin() + static_cast<std::ptrdiff_t>(task.end),
                                [&](Index s) { return column[s] <= split.threshold; });
      const std::size_t cut = static_cast<std::size_t>(mid - samples.begin());

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(task.node)];
      parent.feature = split.feature;
      parent.threshold = split.threshold;
      parent.decrease = split.decrease;
      parent.left = left;
      parent.right = left + 1;
      stack.push_back({left + 1, cut, task.end});
      stack.push_back({left, task.begin, cut});
    }
    return tree;
  }

 private:
  Split best_split(const std::vector<Index>& samples, std::size_t begin, std::size_t end,
                   const std::array<int, 2>& counts) {
    const Index p = x_.cols();
    std::iota(features_.begin(), features_.end(), 0);
    for (int i = 0; i < mtry_; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng_.below(static_cast<std::uint64_t>(p - i));
      std::swap(features_[static_cast<std::size_t>(i)], features_[j]);
    }

    const double size = static_cast<double>(end - begin);
    const double parent_term =
        (static_cast<double>(counts[0]) * counts[0] + static_cast<double>(counts[1]) * counts[1]) / size;
    const double min_gain = 1e-12 * size;

    Split best;
    buffer_.resize(end - begin);
    for (int f = 0; f < mtry_; ++f) {
      const int feature = static_cast<int>(features_[static_cast<std::size_t>(f)]);
      const double* column = x_.col(feature).data();
      for (std::size_t s = begin; s < end; ++s)
        buffer_[s - begin] = {column[samples[s]], y_[static_cast<std::size_t>(samples[s])]};
      std::sort(buffer_.begin(), buffer_.end(),
                [](const SortItem& a, const SortItem& b) { return a.value < b.value; });

      double left[2] = {0.0, 0.0};
      for (std::size_t i = 0; i + 1 < buffer_.size(); ++i) {
        left[buffer_[i].label] += 1.0;
        if (!(buffer_[i].value < buffer_[i + 1].value)) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = size - nl;
        const double r0 = counts[0] - left[0];
        const double r1 = counts[1] - left[1];
        const double decrease = (left[0] * left[0] + left[1] * left[1]) / nl +
                                (r0 * r0 + r1 * r1) / nr - parent_term;
        if (decrease <= min_gain) continue;
        double threshold = 0.5 * (buffer_[i].value + buffer_[i + 1].value);
        if (threshold >= buffer_[i + 1].value) threshold = buffer_[i].value;
        const bool better =
            decrease > best.decrease ||
            (decrease == best.decrease &&
             (feature < best.feature || (feature == best.feature && threshold < best.threshold)));
        if (best.feature < 0 || better) best = {feature, threshold, decrease};
      }
    }
    return best;
  }

  const Matrix& x_;
  const Labels& y_;
  int mtry_;
  int min_node_size_;
  Rng& rng_;
  std::vector<Index> features_;
  std::vector<SortItem> buffer_;
};

}  // namespace

int DecisionTree::predict(const double* row, Index stride) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const TreeNode& node = nodes[at];
    at = static_cast<std::size_t>(row[node.feature * stride] <= node.threshold ? node.left : node.right);
  }
  return nodes[at].counts[1] > nodes[at].counts[0] ? 1 : 0;
}

ForestModel rf_train(const Matrix& x, const Labels& y, const ForestParams& params) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (static_cast<Index>(y.size()) != n) throw std::invalid_argument("rf_train: x and y lengths differ");
  if (n < 2 || p < 1) throw std::invalid_argument("rf_train: need at least 2 rows and 1 feature");
  if (params.n_trees < 1) throw std::invalid_argument("rf_train: n_trees must be >= 1");
  if (params.min_node_size < 1) throw std::invalid_argument("rf_train: min_node_size must be >= 1");
  if (!all_finite(x)) throw std::invalid_argument("rf_train: non-finite features");
  int seen[2] = {0, 0};
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("rf_train: labels must be 0 or 1");
    ++seen[label];
  }
  if (seen[0] == 0 || seen[1] == 0) throw std::invalid_argument("rf_train: outcome has a single class");

  ForestModel model;
  model.params = params;
  model.features = p;
  model.mtry = params.mtry > 0 ? params.mtry
                               : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
  if (model.mtry > p) throw std::invalid_argument("rf_train: mtry exceeds the feature count");
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  parallel_for(model.trees.size(), params.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<Index> samples(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      std::iota(samples.begin(), samples.end(), Index{0});
    }
    TreeBuilder builder(x, y, model.mtry, params.min_node_size, rng);
    model.trees[t] = builder.grow(std::move(samples));
  });

  model.total_decrease = Vector::Zero(p);
  for (const auto& tree : model.trees)
    for (const auto& node : tree.nodes)
      if (!node.is_leaf()) model.total_decrease[node.feature] += node.decrease;
  return model;
}

Labels rf_predict(const ForestModel& model, const Matrix& x) {
  if (x.cols() != model.features) {
    std::ostringstream os;
    os << "rf_predict: model expects " << model.features << " features, got " << x.cols();
    throw std::invalid_argument(os.str());
  }
  const Index n = x.rows();
  Labels out(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    std::size_t votes = 0;
    for (const auto& tree : model.trees) votes += static_cast<std::size_t>(tree.predict(x.data() + r, n));
    out[static_cast<std::size_t>(r)] = 2 * votes > model.trees.size() ? 1 : 0;
  }
  return out;
}

FeatureImportance rf_importance(const ForestModel& model) {
  FeatureImportance out;
  out.values = model.total_decrease / static_cast<double>(std::max<std::size_t>(1, model.trees.size()));
  const double total = out.values.sum();
  if (total > 0.0)
    out.values /= total;
  else
    out.diagnostic = "no splits in any tree; importances left unnormalized at zero";
  return out;
}

double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (truth.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::string forest_to_json(const ForestModel& model) {
  nlohmann::json j;
  j["format"] = "drens-forest";
  j["version"] = 1;
  j["params"] = {{"n_trees", model.params.n_trees},
                 {"mtry", model.mtry},
                 {"min_node_size", model.params.min_node_size},
                 {"bootstrap", model.params.bootstrap},
                 {"seed", model.params.seed}};
  j["features"] = model.features;
  j["total_decrease"] = std::vector<double>(model.total_decrease.begin(), model.total_decrease.end());
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json t;
    for (const auto& node : tree.nodes) {
      t["feature"].push_back(node.feature);
      t["threshold"].push_back(node.threshold);
      t["left"].push_back(node.left);
      t["right"].push_back(node.right);
      t["counts"].push_back({node.counts[0], node.counts[1]});
      t["decrease"].push_back(node.decrease);
    }
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

ForestModel forest_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("format") != "drens-forest" || j.at("version") != 1)
    throw std::invalid_argument("forest_from_json: unsupported format or version");
  ForestModel model;
  const auto& params = j.at("params");
  model.params.n_trees = params.at("n_trees");
  model.params.mtry = params.at("mtry");
  model.params.min_node_size = params.at("min_node_size");
  model.params.bootstrap = params.at("bootstrap");
  model.params.seed = params.at("seed");
  model.mtry = model.params.mtry;
  model.features = j.at("features");
  const std::vector<double> decrease = j.at("total_decrease");
  model.total_decrease = Eigen::Map<const Vector>(decrease.data(), static_cast<Index>(decrease.size()));
  for (const auto& t : j.at("trees")) {
    DecisionTree tree;
    const std::size_t count = t.at("feature").size();
    tree.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      TreeNode& node = tree.nodes[i];
      node.feature = t["feature"][i];
      node.threshold = t["threshold"][i];
      node.left = t["left"][i];
      node.right = t["right"][i];
      node.counts = {t["counts"][i][0].get<int>(), t["counts"][i][1].get<int>()};
      node.decrease = t["decrease"][i];
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace drens
