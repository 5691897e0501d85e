#pragma once

// Ranking metrics, stratified folds, nested cross-validation and cross-course
// transfer.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "attrition/linear.hpp"

namespace attrition {

// Mann–Whitney AUC; tied scores count one half per positive/negative pair.
// Throws DataError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

// F1 of the positive class with "positive" meaning score >= threshold. Zero
// when precision + recall is zero.
double f_measure(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

// Fold index per row. Each class is shuffled with the seed and dealt
// round-robin, so every fold receives both classes. Throws DataError when a
// class has fewer than k rows.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid{0.01, 0.1, 1.0, 10.0, 100.0};
  return grid;
}

struct CvOptions {
  LinearKind kind = LinearKind::logistic;
  std::vector<double> c_grid = default_c_grid();
  int outer_folds = 10;
  int inner_folds = 5;
  std::uint64_t seed = 0;
  bool parallel = true;
};

// Row ids each training stage of one outer fold read.
struct FoldProvenance {
  std::set<std::size_t> test_rows;
  std::set<std::size_t> balance_rows;
  std::set<std::size_t> standardize_rows;
  std::set<std::size_t> tune_rows;
  std::set<std::size_t> fit_rows;
};

struct FoldResult {
  double auc = 0.0;
  double f_measure = 0.0;
  double chosen_c = 0.0;
  std::size_t train_rows = 0;  // after balancing
  std::size_t test_rows = 0;
};

struct EvalReport {
  double auc = 0.0;        // mean over folds
  double f_measure = 0.0;  // mean over folds
  std::vector<FoldResult> per_fold;
  std::vector<FoldProvenance> provenance;
  std::size_t n_rows = 0;
  bool in_sample = false;

  // Most frequently chosen C (smallest on ties).
  double chosen_c_mode() const;
};

// Mean inner-CV AUC per grid point on `train` (already balanced), then the
// argmax (first on ties). The stage reads only `train`.
double select_c(const Dataset& train, LinearKind kind, std::span<const double> c_grid, int folds,
                std::uint64_t seed);

// Outer stratified k-fold; per fold: balance the training part, tune C by inner
// CV, z-score with training statistics, refit and score the untouched test
// part. Throws DataError when fewer than 20 rows would remain after balancing
// or a class cannot populate every fold, and LeakageError when the provenance
// guard finds a test row in any training stage or a label-dependent column.
EvalReport nested_cv(const Dataset& data, const CvOptions& options);

// Recomputes the outer folds from (labels, k, seed) and checks that no stage
// of fold f read a row of test fold f, and that no column's label dependency
// covers a test row. Throws LeakageError.
void verify_fold_provenance(const Dataset& data, const CvOptions& options, const EvalReport& report);

// Trains once on every training-course row (balanced, z-scored with training
// statistics, C tuned by CV on the training course) and scores every test-course
// row. Both datasets must share feature names (SchemaError otherwise).
EvalReport cross_course_eval(const Dataset& train, const Dataset& test, const CvOptions& options,
                             bool same_course = false);

// Table-level convenience: restricts both tables to `whitelist` and `target`.
EvalReport cross_course_eval(const WeeklyFeatureTable& train, const WeeklyFeatureTable& test,
                             std::span<const std::string> whitelist, Target target, const CvOptions& options);

}  // namespace attrition
