#pragma once

// Named experiments over one or two courses, each producing plot-ready CSV
// reports. Every row carries its provenance (course, week, graph kind,
// target, seed, features) and every report is a pure function of
// (inputs, spec, seed).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "attrition/featurize.hpp"
#include "attrition/ingest.hpp"
#include "attrition/linear.hpp"

namespace attrition {

struct LoadedCourse {
  CourseConfig config;
  CourseData data;
  std::vector<std::string> excluded;  // dropped by the on-schedule filter
};

// Reads the four course files and applies the on-schedule filter.
LoadedCourse load_and_filter(const CoursePaths& paths);
LoadedCourse filtered(CourseData data, CourseConfig config);

struct ExperimentSpec {
  std::vector<GraphKind> graph_kinds{GraphKind::type1, GraphKind::type2};
  std::vector<Target> targets;  // empty: experiment default
  std::vector<int> weeks;       // empty: 1..W (or W alone for graph-compare)
  LinearKind model = LinearKind::logistic;
  std::uint64_t seed = 0;
  double selection_threshold = 0.1;
  std::vector<std::string> whitelist;  // cross-course only; empty: shared behavioural features
};

struct Report {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool partial = false;  // some numeric step failed; rows say which

  std::string to_csv() const;
  std::size_t column(const std::string& name) const;  // throws SchemaError
  const std::string& cell(std::size_t row, const std::string& name) const;
};

// Course characteristics table (one row).
Report run_summary(const LoadedCourse& course);

// Social features only, graph-resident students only: nested-CV AUC/F for each
// graph kind × target (default semester_dropout, certificate).
Report run_graph_comparison(const LoadedCourse& course, const ExperimentSpec& spec);

// Per week × target: Gini feature selection on the (balanced) weekly table,
// then nested CV on the selected features. Returns the long table and the
// week × target AUC matrix.
std::vector<Report> run_weekly_prediction(const LoadedCourse& course, const ExperimentSpec& spec);

// "No grade" (every feature) and "Social" (graph features) Cox models on
// end-of-course covariates: the combined table plus one table per model.
std::vector<Report> run_survival(const LoadedCourse& course, const ExperimentSpec& spec);

// Train on course A week w, test on course B week w, for every week and
// target (default semester_dropout, certificate). Also reports the nested-CV
// AUC of the same features within course B. Throws UsageError on mismatched
// W and SchemaError on an empty feature intersection.
Report run_cross_course(const LoadedCourse& train, const LoadedCourse& test, const ExperimentSpec& spec);

void write_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace attrition
