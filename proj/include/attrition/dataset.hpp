#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attrition/featurize.hpp"

namespace attrition {

// Column-major binary classification data.
//
// row_ids identify rows in the source table and survive subsetting, so every
// derived dataset can be traced back to the rows it came from. A column may
// declare the row ids whose *labels* were used to compute it; the
// cross-validation guard refuses any fold whose test rows appear there.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> columns;  // columns[j][i]
  std::vector<int> labels;                   // 0 or 1
  std::vector<std::size_t> row_ids;
  std::vector<std::vector<std::size_t>> label_dependency;  // per column, sorted row ids

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t features() const noexcept { return columns.size(); }
  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept { return rows() - positives(); }

  // Rows by position, in the given order.
  Dataset subset(std::span<const std::size_t> positions) const;
  // Columns by name, in the given order. Throws SchemaError for unknown names.
  Dataset select(std::span<const std::string> names) const;

  // Adds a column; `depends_on_labels_of` lists row ids whose labels fed it.
  void add_column(std::string name, std::vector<double> values, std::vector<std::size_t> depends_on_labels_of = {});
};

// Builds a dataset from a weekly table. Row ids are table row positions.
// graph_only keeps only students on the interaction graph.
Dataset dataset_from_table(const WeeklyFeatureTable& table, std::span<const std::string> features, Target target,
                           bool graph_only = false);

// Throws DataError when a value is NaN or infinite.
void require_finite(const Dataset& data);

}  // namespace attrition
