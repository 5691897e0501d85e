#include "attrition/evaluation.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <numeric>
#include <random>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"

namespace attrition {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw SchemaError("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int y : labels) pos += y ? 1 : 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw DataError("AUC is undefined without both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double P = static_cast<double>(pos), N = static_cast<double>(neg);
  return (pos_rank_sum - P * (P + 1.0) / 2.0) / (P * N);
}

double f_measure(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) throw SchemaError("scores and labels differ in length");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && labels[i]) ++tp;
    else if (predicted) ++fp;
    else if (labels[i]) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = tp / (tp + fp), recall = tp / (tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("need at least two folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
    throw DataError("cannot build " + std::to_string(k) + " stratified folds from " + std::to_string(pos.size()) +
                    " positive and " + std::to_string(neg.size()) + " negative rows");
  }
  std::vector<int> fold(labels.size(), -1);
  std::mt19937_64 rng(seed);
  // Negatives continue the round-robin where positives stopped, which keeps
  // fold sizes within one of each other.
  std::size_t next = 0;
  for (auto* cls : {&pos, &neg}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    for (std::size_t i : *cls) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(k));
  }
  return fold;
}

double EvalReport::chosen_c_mode() const {
  std::map<double, int> counts;
  for (const auto& f : per_fold) ++counts[f.chosen_c];
  double best = 0.0;
  int best_count = -1;
  for (const auto& [c, count] : counts) {
    if (count > best_count) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

namespace {

std::vector<std::size_t> positions_where(const std::vector<int>& fold, int f, bool equal) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if ((fold[i] == f) == equal) out.push_back(i);
  }
  return out;
}

double fit_and_score_auc(const Dataset& train, const Dataset& test, LinearKind kind, double C) {
  const Standardizer z = Standardizer::fit(train);
  const LinearModel model = fit_linear(z.apply(train), kind, C);
  const std::vector<double> s = model.scores(z.apply(test));
  return auc(s, test.labels);
}

void check_label_dependencies(const Dataset& data, const std::vector<int>& fold, int k) {
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> test_ids;
    for (std::size_t i : positions_where(fold, f, true)) test_ids.push_back(data.row_ids[i]);
    std::sort(test_ids.begin(), test_ids.end());
    for (std::size_t j = 0; j < data.features(); ++j) {
      const auto& dep = data.label_dependency[j];
      std::vector<std::size_t> overlap;
      std::set_intersection(dep.begin(), dep.end(), test_ids.begin(), test_ids.end(), std::back_inserter(overlap));
      if (!overlap.empty()) {
        throw LeakageError("feature '" + data.feature_names[j] + "' depends on labels of " +
                           std::to_string(overlap.size()) + " rows in outer test fold " + std::to_string(f));
      }
    }
  }
}

std::set<std::size_t> ids_of(const Dataset& d) { return {d.row_ids.begin(), d.row_ids.end()}; }

}  // namespace

double select_c(const Dataset& train, LinearKind kind, std::span<const double> c_grid, int folds,
                std::uint64_t seed) {
  if (c_grid.empty()) throw UsageError("empty C grid");
  const std::vector<int> fold = stratified_folds(train.labels, folds, seed);
  double best_c = c_grid.front(), best_auc = -1.0;
  for (double C : c_grid) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      const auto tr = positions_where(fold, f, false), te = positions_where(fold, f, true);
      total += fit_and_score_auc(train.subset(tr), train.subset(te), kind, C);
    }
    const double mean = total / folds;
    if (mean > best_auc) {
      best_auc = mean;
      best_c = C;
    }
  }
  return best_c;
}

EvalReport nested_cv(const Dataset& data, const CvOptions& options) {
  const std::size_t minority = std::min(data.positives(), data.negatives());
  if (2 * minority < 20) {
    throw DataError("nested CV needs at least 20 rows after balancing, have " + std::to_string(2 * minority));
  }
  const int k = options.outer_folds;
  const std::vector<int> fold = stratified_folds(data.labels, k, mix_seed(options.seed, 1));
  check_label_dependencies(data, fold, k);

  auto run_fold = [&](int f) {
    std::pair<FoldResult, FoldProvenance> out;
    auto& [result, prov] = out;
    const Dataset train = data.subset(positions_where(fold, f, false));
    const Dataset test = data.subset(positions_where(fold, f, true));
    prov.test_rows = ids_of(test);

    prov.balance_rows = ids_of(train);
    const Dataset balanced = balance(train, mix_seed(options.seed, 100 + static_cast<std::uint64_t>(f)));

    prov.tune_rows = ids_of(balanced);
    result.chosen_c = select_c(balanced, options.kind, options.c_grid, options.inner_folds,
                               mix_seed(options.seed, 200 + static_cast<std::uint64_t>(f)));

    prov.standardize_rows = ids_of(balanced);
    const Standardizer z = Standardizer::fit(balanced);
    prov.fit_rows = ids_of(balanced);
    const LinearModel model = fit_linear(z.apply(balanced), options.kind, result.chosen_c);

    const std::vector<double> s = model.scores(z.apply(test));
    result.auc = auc(s, test.labels);
    result.f_measure = f_measure(s, test.labels);
    result.train_rows = balanced.rows();
    result.test_rows = test.rows();
    return out;
  };

  std::vector<std::pair<FoldResult, FoldProvenance>> folds(static_cast<std::size_t>(k));
  if (options.parallel) {
    std::vector<std::future<std::pair<FoldResult, FoldProvenance>>> pending;
    for (int f = 0; f < k; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));
    for (int f = 0; f < k; ++f) folds[static_cast<std::size_t>(f)] = pending[static_cast<std::size_t>(f)].get();
  } else {
    for (int f = 0; f < k; ++f) folds[static_cast<std::size_t>(f)] = run_fold(f);
  }

  EvalReport report;
  report.n_rows = data.rows();
  for (auto& [result, prov] : folds) {
    report.auc += result.auc / k;
    report.f_measure += result.f_measure / k;
    report.per_fold.push_back(result);
    report.provenance.push_back(std::move(prov));
  }
  verify_fold_provenance(data, options, report);
  return report;
}

void verify_fold_provenance(const Dataset& data, const CvOptions& options, const EvalReport& report) {
  const int k = options.outer_folds;
  const std::vector<int> fold = stratified_folds(data.labels, k, mix_seed(options.seed, 1));
  check_label_dependencies(data, fold, k);
  if (report.provenance.size() != static_cast<std::size_t>(k)) {
    throw LeakageError("provenance missing for some outer folds");
  }
  for (int f = 0; f < k; ++f) {
    std::set<std::size_t> expected_test;
    for (std::size_t i : positions_where(fold, f, true)) expected_test.insert(data.row_ids[i]);
    const FoldProvenance& prov = report.provenance[static_cast<std::size_t>(f)];
    if (prov.test_rows != expected_test) {
      throw LeakageError("outer fold " + std::to_string(f) + " was not scored on its own test rows");
    }
    for (const auto* stage : {&prov.balance_rows, &prov.standardize_rows, &prov.tune_rows, &prov.fit_rows}) {
      for (std::size_t id : *stage) {
        if (expected_test.count(id)) {
          throw LeakageError("training stage of outer fold " + std::to_string(f) + " read test row " +
                             std::to_string(id));
        }
      }
    }
  }
}

EvalReport cross_course_eval(const Dataset& train, const Dataset& test, const CvOptions& options, bool same_course) {
  if (train.feature_names != test.feature_names) {
    throw SchemaError("training and test courses expose different feature lists");
  }
  const Dataset balanced = balance(train, mix_seed(options.seed, 1));
  FoldResult result;
  result.chosen_c = select_c(balanced, options.kind, options.c_grid, options.inner_folds, mix_seed(options.seed, 2));
  const Standardizer z = Standardizer::fit(balanced);
  const LinearModel model = fit_linear(z.apply(balanced), options.kind, result.chosen_c);
  const std::vector<double> s = model.scores(z.apply(test));
  result.auc = auc(s, test.labels);
  result.f_measure = f_measure(s, test.labels);
  result.train_rows = balanced.rows();
  result.test_rows = test.rows();

  EvalReport report;
  report.auc = result.auc;
  report.f_measure = result.f_measure;
  report.per_fold.push_back(result);
  report.n_rows = test.rows();
  report.in_sample = same_course;
  return report;
}

EvalReport cross_course_eval(const WeeklyFeatureTable& train, const WeeklyFeatureTable& test,
                             std::span<const std::string> whitelist, Target target, const CvOptions& options) {
  if (train.week != test.week) throw UsageError("cross-course evaluation needs the same week on both sides");
  for (const auto& f : whitelist) {
    if (!train.has_feature(f)) throw SchemaError("training course lacks feature '" + f + "'");
    if (!test.has_feature(f)) throw SchemaError("test course lacks feature '" + f + "'");
  }
  return cross_course_eval(dataset_from_table(train, whitelist, target), dataset_from_table(test, whitelist, target),
                           options, train.course_id == test.course_id);
}

}  // namespace attrition
