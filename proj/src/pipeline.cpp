#include "attrition/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "attrition/csv.hpp"
#include "attrition/dataset.hpp"
#include "attrition/error.hpp"
#include "attrition/evaluation.hpp"
#include "attrition/survival.hpp"
#include "attrition/tree.hpp"

namespace attrition {

LoadedCourse load_and_filter(const CoursePaths& paths) {
  CourseConfig config = read_config(paths.config);
  CourseData data = load_course(paths.events, paths.forum, paths.outcomes, config);
  return filtered(std::move(data), std::move(config));
}

LoadedCourse filtered(CourseData data, CourseConfig config) {
  FilterResult f = filter_on_schedule(data, config);
  return {std::move(config), std::move(f.data), std::move(f.excluded)};
}

std::string Report::to_csv() const {
  std::string out = csv::join(header) + '\n';
  for (const auto& row : rows) out += csv::join(row) + '\n';
  return out;
}

std::size_t Report::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("report '" + this->name + "' has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

const std::string& Report::cell(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

void write_report(const Report& report, const std::filesystem::path& out_dir) {
  csv::write_text(out_dir / (report.name + ".csv"), report.to_csv());
}

namespace {

std::string joined(const std::vector<std::string>& names) { return csv::join(names, ';'); }

std::string c_value(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", c);
  return buf;
}

std::vector<int> weeks_or_all(const ExperimentSpec& spec, const CourseConfig& config) {
  std::vector<int> weeks = spec.weeks;
  if (weeks.empty()) {
    for (int w = 1; w <= config.num_weeks; ++w) weeks.push_back(w);
  }
  for (int w : weeks) {
    if (w < 1 || w > config.num_weeks) {
      throw UsageError("week " + std::to_string(w) + " outside 1.." + std::to_string(config.num_weeks));
    }
  }
  return weeks;
}

std::vector<Target> targets_or(const ExperimentSpec& spec, std::vector<Target> fallback) {
  return spec.targets.empty() ? fallback : spec.targets;
}

CvOptions cv_options(const ExperimentSpec& spec) {
  CvOptions o;
  o.kind = spec.model;
  o.seed = spec.seed;
  return o;
}

GraphKind primary_kind(const ExperimentSpec& spec) {
  return spec.graph_kinds.empty() ? GraphKind::type1 : spec.graph_kinds.front();
}

// Skipped rows keep their provenance and leave the metric cells empty.
struct Outcome {
  std::string n_rows, auc, f_measure, chosen_c, status = "ok";
};

Outcome evaluated(const EvalReport& r) {
  return {std::to_string(r.n_rows), csv::fixed6(r.auc), csv::fixed6(r.f_measure), c_value(r.chosen_c_mode()), "ok"};
}

Outcome skipped(const std::string& why, std::size_t n_rows) {
  Outcome o;
  o.n_rows = std::to_string(n_rows);
  o.status = "skipped: " + why;
  return o;
}

}  // namespace

Report run_summary(const LoadedCourse& course) {
  const SummaryReport r = dataset_summary(course.data);
  Report report;
  report.name = "summary";
  report.header = {"course_id",        "enrolled",          "forum_active",     "with_submissions",
                   "forum_posts",      "with_activity",     "nonzero_grades",   "certificates",
                   "thread_count",     "thread_avg_length", "thread_max_length", "thread_min_length",
                   "excluded_off_schedule"};
  report.rows.push_back({course.config.course_id, std::to_string(r.enrolled), std::to_string(r.forum_active),
                         std::to_string(r.with_submissions), std::to_string(r.forum_posts),
                         std::to_string(r.with_activity), std::to_string(r.nonzero_grades),
                         std::to_string(r.certificates), std::to_string(r.thread_count),
                         csv::fixed6(r.thread_avg_length), std::to_string(r.thread_max_length),
                         std::to_string(r.thread_min_length), std::to_string(course.excluded.size())});
  return report;
}

Report run_graph_comparison(const LoadedCourse& course, const ExperimentSpec& spec) {
  const CourseConfig& cfg = course.config;
  std::vector<int> weeks = spec.weeks.empty() ? std::vector<int>{cfg.num_weeks} : weeks_or_all(spec, cfg);
  const auto targets = targets_or(spec, {Target::semester_dropout, Target::certificate});
  const auto& features = social_feature_names();

  Report report;
  report.name = "graph_compare";
  report.header = {"course_id", "week",     "graph_kind", "target",     "model",    "seed",
                   "features",  "n_rows",   "auc",        "f_measure",  "chosen_c", "status"};
  for (int week : weeks) {
    for (GraphKind kind : spec.graph_kinds) {
      const WeeklyFeatureTable table = assemble_weekly(course.data, cfg, week, kind);
      for (Target target : targets) {
        const Dataset data = dataset_from_table(table, features, target, /*graph_only=*/true);
        Outcome o;
        if (data.rows() == 0) {
          o = skipped("empty graph", 0);
        } else {
          try {
            o = evaluated(nested_cv(data, cv_options(spec)));
          } catch (const LeakageError&) {
            throw;
          } catch (const SchemaError&) {
            throw;
          } catch (const DataError& e) {
            o = skipped(e.what(), data.rows());
          }
        }
        report.rows.push_back({cfg.course_id, std::to_string(week), std::string(to_string(kind)),
                               std::string(to_string(target)), std::string(to_string(spec.model)),
                               std::to_string(spec.seed), joined(features), o.n_rows, o.auc, o.f_measure, o.chosen_c,
                               o.status});
      }
    }
  }
  return report;
}

std::vector<Report> run_weekly_prediction(const LoadedCourse& course, const ExperimentSpec& spec) {
  const CourseConfig& cfg = course.config;
  const auto weeks = weeks_or_all(spec, cfg);
  const auto targets = targets_or(spec, {kAllTargets.begin(), kAllTargets.end()});
  const GraphKind kind = primary_kind(spec);
  const std::vector<std::string> features = feature_names_for(cfg.platform_profile);

  Report report;
  report.name = "weekly_predict";
  report.header = {"course_id", "week",     "graph_kind", "target",            "model",
                   "seed",      "n_rows",   "auc",        "f_measure",         "chosen_c",
                   "selected_features",     "importances", "status"};
  Report matrix;
  matrix.name = "weekly_auc_matrix";
  matrix.header = {"course_id", "week", "graph_kind", "seed"};
  for (Target t : targets) matrix.header.emplace_back(to_string(t));

  for (int week : weeks) {
    const WeeklyFeatureTable table = assemble_weekly(course.data, cfg, week, kind);
    std::vector<std::string> matrix_row{cfg.course_id, std::to_string(week), std::string(to_string(kind)),
                                        std::to_string(spec.seed)};
    for (Target target : targets) {
      const Dataset all = dataset_from_table(table, features, target);
      Outcome o;
      std::vector<std::string> selected;
      std::string importances;
      try {
        // Selection on the balanced weekly table, as a preprocessing step
        // ahead of the cross-validated evaluation.
        const std::uint64_t sel_seed = mix_seed(spec.seed, 0x5e1ec7 + static_cast<std::uint64_t>(week));
        const std::vector<double> imp = gini_importance(balance(all, sel_seed));
        std::vector<std::string> parts;
        for (std::size_t j = 0; j < features.size(); ++j) parts.push_back(features[j] + ':' + csv::fixed6(imp[j]));
        importances = joined(parts);
        for (const auto& r : select_features(features, imp, spec.selection_threshold)) selected.push_back(r.name);
        o = evaluated(nested_cv(all.select(selected), cv_options(spec)));
      } catch (const LeakageError&) {
        throw;
      } catch (const SchemaError&) {
        throw;
      } catch (const DataError& e) {
        o = skipped(e.what(), all.rows());
      }
      matrix_row.push_back(o.auc);
      report.rows.push_back({cfg.course_id, std::to_string(week), std::string(to_string(kind)),
                             std::string(to_string(target)), std::string(to_string(spec.model)),
                             std::to_string(spec.seed), o.n_rows, o.auc, o.f_measure, o.chosen_c, joined(selected),
                             importances, o.status});
    }
    matrix.rows.push_back(std::move(matrix_row));
  }
  return {report, matrix};
}

std::vector<Report> run_survival(const LoadedCourse& course, const ExperimentSpec& spec) {
  const CourseConfig& cfg = course.config;
  const GraphKind kind = primary_kind(spec);
  const std::vector<CovariateSpec> models{no_grade_model(cfg.platform_profile, kind), social_model(kind)};

  struct ModelResult {
    std::vector<HazardRow> rows;
    std::string status = "ok";
    std::size_t n = 0, events = 0;
    CoxFit fit;
  };
  std::vector<ModelResult> results;
  bool partial = false;
  for (const auto& model : models) {
    ModelResult r;
    try {
      const auto records = to_survival_records(course.data, cfg, model);
      r.n = records.size();
      for (const auto& rec : records) r.events += rec.event ? 1 : 0;
      r.fit = cox_fit_standardized(records, model.features);
      r.rows = hazard_report(r.fit, model.features);
    } catch (const NumericError& e) {
      r.status = std::string("failed: ") + e.what();
      partial = true;
    }
    results.push_back(std::move(r));
  }

  // Combined table: one row per feature in the union, model blocks side by side.
  std::vector<std::string> union_features;
  for (const auto& model : models) {
    for (const auto& f : model.features) {
      if (std::find(union_features.begin(), union_features.end(), f) == union_features.end()) {
        union_features.push_back(f);
      }
    }
  }
  Report combined;
  combined.name = "survival";
  combined.partial = partial;
  combined.header = {"course_id", "graph_kind", "seed", "feature", "mean", "sd"};
  for (const auto& model : models) {
    for (const char* col : {"_hr", "_se", "_p", "_stars"}) combined.header.push_back(model.name + col);
  }
  for (const auto& feature : union_features) {
    std::vector<std::string> row{cfg.course_id, std::string(to_string(kind)), std::to_string(spec.seed), feature, "",
                                 ""};
    for (const auto& r : results) {
      const auto it = std::find_if(r.rows.begin(), r.rows.end(), [&](const HazardRow& h) { return h.feature == feature; });
      if (it == r.rows.end()) {
        row.insert(row.end(), {"", "", "", ""});
        continue;
      }
      if (row[4].empty()) {
        row[4] = csv::fixed6(it->mean);
        row[5] = csv::fixed6(it->sd);
      }
      row.insert(row.end(), {csv::fixed6(it->hr), csv::fixed6(it->se), csv::fixed6(it->p), it->stars});
    }
    combined.rows.push_back(std::move(row));
  }

  Report status;
  status.name = "survival_models";
  status.partial = partial;
  status.header = {"course_id", "graph_kind", "seed", "model", "features", "n", "events", "loglik", "iterations",
                   "converged", "status"};
  std::vector<Report> out{combined};
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& r = results[m];
    const bool ok = r.status == "ok";
    status.rows.push_back({cfg.course_id, std::string(to_string(kind)), std::to_string(spec.seed), models[m].name,
                           joined(models[m].features), std::to_string(r.n), std::to_string(r.events),
                           ok ? csv::fixed6(r.fit.loglik) : "", ok ? std::to_string(r.fit.iterations) : "",
                           ok ? (r.fit.converged ? "1" : "0") : "", r.status});
    Report single;
    single.name = "survival_" + models[m].name;
    single.partial = !ok;
    single.header = {"feature", "mean", "sd", "hr", "se", "p", "stars"};
    for (const auto& h : r.rows) {
      single.rows.push_back({h.feature, csv::fixed6(h.mean), csv::fixed6(h.sd), csv::fixed6(h.hr), csv::fixed6(h.se),
                             csv::fixed6(h.p), h.stars});
    }
    out.push_back(std::move(single));
  }
  out.push_back(std::move(status));
  return out;
}

Report run_cross_course(const LoadedCourse& train, const LoadedCourse& test, const ExperimentSpec& spec) {
  if (train.config.num_weeks != test.config.num_weeks) {
    throw UsageError("cross-course evaluation needs equal course lengths (" + std::to_string(train.config.num_weeks) +
                     " vs " + std::to_string(test.config.num_weeks) + " weeks)");
  }
  std::vector<std::string> features = spec.whitelist;
  if (features.empty()) {
    const auto a = behavioral_feature_names(train.config.platform_profile);
    const auto b = behavioral_feature_names(test.config.platform_profile);
    for (const auto& f : a) {
      if (std::find(b.begin(), b.end(), f) != b.end()) features.push_back(f);
    }
  }
  if (features.empty()) throw SchemaError("the two courses share no behavioural features");

  const auto weeks = weeks_or_all(spec, train.config);
  const auto targets = targets_or(spec, {Target::semester_dropout, Target::certificate});
  const GraphKind kind = primary_kind(spec);
  const CvOptions options = cv_options(spec);

  Report report;
  report.name = "cross_course";
  report.header = {"train_course", "test_course", "week",      "graph_kind",       "target",
                   "model",        "seed",        "features",  "n_rows",           "auc",
                   "f_measure",    "chosen_c",    "in_sample", "within_course_auc", "status"};
  for (int week : weeks) {
    const WeeklyFeatureTable a = assemble_weekly(train.data, train.config, week, kind);
    const WeeklyFeatureTable b = assemble_weekly(test.data, test.config, week, kind);
    for (Target target : targets) {
      Outcome o;
      std::string in_sample = train.config.course_id == test.config.course_id ? "1" : "0";
      std::string within;
      try {
        o = evaluated(cross_course_eval(a, b, features, target, options));
      } catch (const LeakageError&) {
        throw;
      } catch (const SchemaError&) {
        throw;
      } catch (const DataError& e) {
        o = skipped(e.what(), b.size());
      }
      try {
        within = csv::fixed6(nested_cv(dataset_from_table(b, features, target), options).auc);
      } catch (const DataError&) {
      }
      report.rows.push_back({train.config.course_id, test.config.course_id, std::to_string(week),
                             std::string(to_string(kind)), std::string(to_string(target)),
                             std::string(to_string(spec.model)), std::to_string(spec.seed), joined(features), o.n_rows,
                             o.auc, o.f_measure, o.chosen_c, in_sample, within, o.status});
    }
  }
  return report;
}

}  // namespace attrition
