// attrition: command-line front end for the course attrition experiments.
//
// Exit codes: 0 success, 2 usage error, 3 data or integrity error, 4 numeric
// failure (reports written so far are kept).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "attrition/error.hpp"
#include "attrition/pipeline.hpp"
#include "attrition/synth.hpp"

namespace fs = std::filesystem;
using namespace attrition;

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kNumeric = 4;

// "3", "2-5" or "1,3,6" (ranges may appear in a comma list).
std::vector<int> parse_weeks(const std::string& text) {
  std::vector<int> weeks;
  std::size_t pos = 0;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad week list '" + text + "'");
    }
  };
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos) {
      weeks.push_back(number(item));
    } else {
      const int lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
      if (lo > hi) throw UsageError("bad week range '" + item + "'");
      for (int w = lo; w <= hi; ++w) weeks.push_back(w);
    }
    pos = comma + 1;
  }
  return weeks;
}

struct CourseArgs {
  std::vector<std::string> course_dirs, configs, events, forums, outcomes;

  void attach(CLI::App* cmd) {
    cmd->add_option("--course", course_dirs, "Directory holding course.cfg, events.jsonl, forum.jsonl, outcomes.csv");
    cmd->add_option("--config", configs, "Course configuration file");
    cmd->add_option("--events", events, "Event log (JSON Lines)");
    cmd->add_option("--forum", forums, "Forum posts (JSON Lines)");
    cmd->add_option("--outcomes", outcomes, "Per-student outcomes (CSV)");
  }

  std::vector<CoursePaths> paths() const {
    std::vector<CoursePaths> out;
    for (const auto& d : course_dirs) out.push_back(CoursePaths::in_directory(d));
    const std::size_t n = configs.size();
    if (events.size() != n || forums.size() != n || outcomes.size() != n) {
      throw UsageError("--config, --events, --forum and --outcomes must be given the same number of times");
    }
    for (std::size_t i = 0; i < n; ++i) out.push_back({events[i], forums[i], outcomes[i], configs[i]});
    return out;
  }
};

struct ExperimentArgs {
  CourseArgs course;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::vector<std::string> graph_kinds;
  std::string weeks;
  std::vector<std::string> targets;
  std::string model = "logistic";

  void attach(CLI::App* cmd) {
    course.attach(cmd);
    cmd->add_option("--out-dir", out_dir, "Directory for the CSV reports");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--graph-kind", graph_kinds, "type1 or type2 (repeatable)");
    cmd->add_option("--weeks", weeks, "Weeks to evaluate, e.g. 3, 1-6 or 1,3,5");
    cmd->add_option("--target", targets, "semester_dropout, week_dropout, inactive_next_week or certificate (repeatable)");
    cmd->add_option("--model", model, "logistic or linear_svm");
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.seed = seed;
    s.model = parse_linear_kind(model);
    if (!graph_kinds.empty()) {
      s.graph_kinds.clear();
      for (const auto& k : graph_kinds) s.graph_kinds.push_back(parse_graph_kind(k));
    }
    if (!weeks.empty()) s.weeks = parse_weeks(weeks);
    for (const auto& t : targets) s.targets.push_back(parse_target(t));
    return s;
  }

  std::vector<LoadedCourse> load(std::size_t expected) const {
    const auto paths = course.paths();
    if (paths.size() != expected) {
      throw UsageError("expected " + std::to_string(expected) + " course(s), got " + std::to_string(paths.size()));
    }
    std::vector<LoadedCourse> out;
    for (const auto& p : paths) out.push_back(load_and_filter(p));
    return out;
  }
};

int emit(const std::vector<Report>& reports, const fs::path& out_dir) {
  bool partial = false;
  for (const auto& r : reports) {
    write_report(r, out_dir);
    std::cout << "wrote " << (out_dir / (r.name + ".csv")).string() << '\n';
    partial = partial || r.partial;
  }
  if (partial) {
    std::cerr << "error: some models failed numerically; see the status columns\n";
    return kNumeric;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Course attrition analysis: feature tables, interaction graphs, survival and prediction"};
  app.require_subcommand(1);

  ExperimentArgs summarize_args, graph_args, weekly_args, survival_args, cross_args;
  auto* summarize = app.add_subcommand("summarize", "Course characteristics table");
  summarize_args.attach(summarize);
  auto* graph = app.add_subcommand("graph-compare", "Social-feature prediction on each interaction graph");
  graph_args.attach(graph);
  auto* weekly = app.add_subcommand("weekly-predict", "Per-week feature selection and nested cross-validation");
  weekly_args.attach(weekly);
  auto* survival = app.add_subcommand("survival", "Cox hazard ratios for the no-grade and social models");
  survival_args.attach(survival);
  auto* cross = app.add_subcommand("cross-course", "Train on the first course, test on the second");
  cross_args.attach(cross);
  std::vector<std::string> whitelist;
  cross->add_option("--feature", whitelist, "Feature to use (repeatable; default: shared behavioural features)");

  SynthConfig synth;
  std::string synth_out = "synthetic";
  std::string profile = "coursera_like";
  std::string twin_profile;
  bool same_seed = false;
  auto* gen = app.add_subcommand("synth-generate", "Write a synthetic course with its ground truth");
  gen->add_option("--out-dir", synth_out, "Output directory");
  gen->add_option("--seed", synth.seed, "Random seed");
  gen->add_option("--weeks", synth.num_weeks, "Course length in weeks");
  gen->add_option("--n-students", synth.n_students, "Number of students");
  gen->add_option("--profile", profile, "coursera_like or edx_like");
  gen->add_option("--course-id", synth.course_id, "Course identifier");
  gen->add_option("--forum-probability", synth.forum_probability, "Forum participation scale");
  gen->add_flag("--flat-replies", synth.flat_replies, "Every reply answers the thread root");
  gen->add_option("--peer-effect", synth.hazard.dropped_partners,
                  "Hazard coefficient on the share of reply partners who already left");
  gen->add_option("--reply-effect", synth.hazard.replies_received,
                  "Hazard coefficient on log(1 + replies received)");
  gen->add_option("--twin", twin_profile, "Also write a twin course on this profile (into a/ and b/)");
  gen->add_flag("--same-seed", same_seed, "Twin courses share one seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (summarize->parsed()) {
      std::vector<Report> reports;
      for (const auto& c : summarize_args.load(summarize_args.course.paths().size())) {
        Report r = run_summary(c);
        r.name += "_" + c.config.course_id;
        reports.push_back(std::move(r));
      }
      if (reports.empty()) throw UsageError("no course given");
      return emit(reports, summarize_args.out_dir);
    }
    if (graph->parsed()) {
      const auto courses = graph_args.load(1);
      return emit({run_graph_comparison(courses[0], graph_args.spec())}, graph_args.out_dir);
    }
    if (weekly->parsed()) {
      const auto courses = weekly_args.load(1);
      return emit(run_weekly_prediction(courses[0], weekly_args.spec()), weekly_args.out_dir);
    }
    if (survival->parsed()) {
      const auto courses = survival_args.load(1);
      return emit(run_survival(courses[0], survival_args.spec()), survival_args.out_dir);
    }
    if (cross->parsed()) {
      const auto courses = cross_args.load(2);
      ExperimentSpec spec = cross_args.spec();
      spec.whitelist = whitelist;
      return emit({run_cross_course(courses[0], courses[1], spec)}, cross_args.out_dir);
    }
    if (gen->parsed()) {
      try {
        synth.profile = parse_profile(profile);
      } catch (const DataError& e) {
        throw UsageError(e.what());
      }
      if (twin_profile.empty()) {
        save_synth_course(synth_out, generate_course(synth));
        std::cout << "wrote " << synth_out << '\n';
      } else {
        PlatformProfile other;
        try {
          other = parse_profile(twin_profile);
        } catch (const DataError& e) {
          throw UsageError(e.what());
        }
        const auto [a, b] = twin_courses(synth, synth.profile, other, same_seed);
        save_synth_course(fs::path(synth_out) / "a", a);
        save_synth_course(fs::path(synth_out) / "b", b);
        std::cout << "wrote " << (fs::path(synth_out) / "a").string() << " and "
                  << (fs::path(synth_out) / "b").string() << '\n';
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
