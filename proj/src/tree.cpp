#include "attrition/tree.hpp"

#include <algorithm>
#include <numeric>

#include "attrition/error.hpp"

namespace attrition {

double gini_impurity(std::size_t positives, std::size_t total) noexcept {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

namespace {

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = -1.0;
};

// Decreases within this margin are treated as ties so that symmetric splits
// resolve by feature index and threshold, not by rounding noise.
constexpr double kTieMargin = 1e-12;

std::optional<SplitChoice> best_split(const Dataset& data, const std::vector<std::size_t>& rows) {
  const std::size_t m = rows.size();
  std::size_t pos = 0;
  for (std::size_t i : rows) pos += static_cast<std::size_t>(data.labels[i]);
  const double parent = gini_impurity(pos, m);

  std::optional<SplitChoice> best;
  std::vector<std::size_t> order(rows);
  for (std::size_t f = 0; f < data.features(); ++f) {
    const auto& col = data.columns[f];
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    std::size_t left_pos = 0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      left_pos += static_cast<std::size_t>(data.labels[order[k]]);
      const double lo = col[order[k]], hi = col[order[k + 1]];
      if (!(lo < hi)) continue;
      const std::size_t nl = k + 1, nr = m - nl;
      const double child = (static_cast<double>(nl) * gini_impurity(left_pos, nl) +
                            static_cast<double>(nr) * gini_impurity(pos - left_pos, nr)) /
                           static_cast<double>(m);
      const double decrease = std::max(0.0, parent - child);
      if (!best || decrease > best->decrease + kTieMargin) best = SplitChoice{f, lo + (hi - lo) / 2.0, decrease};
    }
  }
  return best;
}

}  // namespace

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return deepest;
}

double DecisionTree::predict(std::span<const double> row) const {
  int id = 0;
  while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    id = row[*n.split_feature] <= n.split_threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(id)].positive_share;
}

DecisionTree grow_tree(const Dataset& data) {
  const std::size_t n = data.rows();
  if (n < 2) throw DataError("tree needs at least two rows");
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == n) throw DataError("tree needs both classes in the label");

  DecisionTree tree;
  std::vector<std::pair<int, std::vector<std::size_t>>> pending;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  tree.nodes.emplace_back();
  pending.emplace_back(0, std::move(all));

  while (!pending.empty()) {
    auto [id, rows] = std::move(pending.back());
    pending.pop_back();
    std::size_t node_pos = 0;
    for (std::size_t i : rows) node_pos += static_cast<std::size_t>(data.labels[i]);
    {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.samples = rows.size();
      node.sample_fraction = static_cast<double>(rows.size()) / static_cast<double>(n);
      node.positive_share = static_cast<double>(node_pos) / static_cast<double>(rows.size());
    }
    const bool pure = node_pos == 0 || node_pos == rows.size();
    if (pure || rows.size() < 2) continue;
    const auto split = best_split(data, rows);
    if (!split) continue;  // identical feature vectors with mixed labels

    std::vector<std::size_t> left, right;
    for (std::size_t i : rows) {
      (data.columns[split->feature][i] <= split->threshold ? left : right).push_back(i);
    }
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.split_feature = split->feature;
    node.split_threshold = split->threshold;
    node.gini_decrease = split->decrease;
    node.left = left_id;
    node.right = left_id + 1;
    pending.emplace_back(left_id + 1, std::move(right));
    pending.emplace_back(left_id, std::move(left));
  }
  return tree;
}

std::vector<double> gini_importance(const Dataset& data) {
  const DecisionTree tree = grow_tree(data);
  std::vector<double> importance(data.features(), 0.0);
  for (const auto& node : tree.nodes) {
    if (!node.is_leaf()) importance[*node.split_feature] += node.sample_fraction * node.gini_decrease;
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

std::vector<RankedFeature> select_features(std::span<const std::string> names, std::span<const double> importances,
                                           double threshold) {
  if (names.size() != importances.size()) throw SchemaError("feature names and importances differ in length");
  std::vector<RankedFeature> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (importances[i] > threshold) out.push_back({names[i], importances[i]});
  }
  if (out.empty()) {
    throw DataError("no feature has importance above " + std::to_string(threshold) + "; lower the threshold");
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.importance > b.importance; });
  return out;
}

}  // namespace attrition
