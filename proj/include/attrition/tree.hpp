#pragma once

// CART classification tree on the Gini criterion, used for feature ranking.

#include <optional>
#include <string>
#include <vector>

#include "attrition/dataset.hpp"

namespace attrition {

struct TreeNode {
  std::optional<std::size_t> split_feature;  // empty for a leaf
  double split_threshold = 0.0;              // rows with value <= threshold go left
  double gini_decrease = 0.0;                // parent impurity − weighted child impurity
  double sample_fraction = 0.0;              // node rows / root rows
  std::size_t samples = 0;
  double positive_share = 0.0;               // leaf class distribution is (1 − s, s)
  int left = -1;
  int right = -1;

  bool is_leaf() const noexcept { return !split_feature.has_value(); }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const;  // edges on the longest root-to-leaf path
  double predict(std::span<const double> row) const;  // positive share of the reached leaf
};

double gini_impurity(std::size_t positives, std::size_t total) noexcept;

// Grows to purity; a node splits only with at least two rows and at least one
// threshold separating distinct values. Among equal decreases the lowest
// feature index, then the lowest threshold, wins.
DecisionTree grow_tree(const Dataset& data);

// Σ over splits on each feature of sample_fraction × gini_decrease, normalised
// to sum to one. All zeros when the tree never splits. Throws DataError for
// fewer than two rows or a single-class label.
std::vector<double> gini_importance(const Dataset& data);

struct RankedFeature {
  std::string name;
  double importance = 0.0;
};

// Features with importance strictly above `threshold`, by descending
// importance (ties keep input order). Throws DataError when none qualify.
std::vector<RankedFeature> select_features(std::span<const std::string> names, std::span<const double> importances,
                                           double threshold = 0.1);

}  // namespace attrition
