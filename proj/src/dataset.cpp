#include "attrition/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "attrition/error.hpp"

namespace attrition {

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
  Dataset out;
  out.feature_names = feature_names;
  out.label_dependency = label_dependency;
  out.columns.assign(columns.size(), std::vector<double>(positions.size()));
  out.labels.resize(positions.size());
  out.row_ids.resize(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const std::size_t i = positions[k];
    for (std::size_t j = 0; j < columns.size(); ++j) out.columns[j][k] = columns[j][i];
    out.labels[k] = labels[i];
    out.row_ids[k] = row_ids[i];
  }
  return out;
}

Dataset Dataset::select(std::span<const std::string> names) const {
  Dataset out;
  out.labels = labels;
  out.row_ids = row_ids;
  for (const auto& name : names) {
    auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw SchemaError("feature '" + name + "' not in dataset");
    const auto j = static_cast<std::size_t>(it - feature_names.begin());
    out.feature_names.push_back(name);
    out.columns.push_back(columns[j]);
    out.label_dependency.push_back(label_dependency[j]);
  }
  return out;
}

void Dataset::add_column(std::string name, std::vector<double> values, std::vector<std::size_t> depends_on_labels_of) {
  if (values.size() != rows()) throw SchemaError("column '" + name + "' has the wrong length");
  std::sort(depends_on_labels_of.begin(), depends_on_labels_of.end());
  feature_names.push_back(std::move(name));
  columns.push_back(std::move(values));
  label_dependency.push_back(std::move(depends_on_labels_of));
}

Dataset dataset_from_table(const WeeklyFeatureTable& table, std::span<const std::string> features, Target target,
                           bool graph_only) {
  std::vector<std::size_t> cols;
  for (const auto& f : features) cols.push_back(table.feature_index(f));
  Dataset out;
  out.feature_names.assign(features.begin(), features.end());
  out.columns.resize(cols.size());
  out.label_dependency.resize(cols.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (graph_only && !table.in_graph[i]) continue;
    for (std::size_t j = 0; j < cols.size(); ++j) out.columns[j].push_back(table.rows[i][cols[j]]);
    out.labels.push_back(table.labels[i].get(target) ? 1 : 0);
    out.row_ids.push_back(i);
  }
  return out;
}

void require_finite(const Dataset& data) {
  for (std::size_t j = 0; j < data.features(); ++j) {
    for (double v : data.columns[j]) {
      if (!std::isfinite(v)) throw DataError("non-finite value in feature '" + data.feature_names[j] + "'");
    }
  }
}

}  // namespace attrition
