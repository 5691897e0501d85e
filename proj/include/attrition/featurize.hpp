#pragma once

// Cumulative per-week feature tables and the four target labels.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "attrition/forum_graph.hpp"
#include "attrition/ingest.hpp"

namespace attrition {

enum class Target { semester_dropout, week_dropout, inactive_next_week, certificate };

inline constexpr std::array<Target, 4> kAllTargets{Target::semester_dropout, Target::week_dropout,
                                                   Target::inactive_next_week, Target::certificate};

std::string_view to_string(Target t) noexcept;
Target parse_target(std::string_view s);  // throws UsageError

struct LabelSet {
  bool semester_dropout = false;
  bool week_dropout = false;
  bool inactive_next_week = false;
  bool certificate = false;

  bool get(Target t) const noexcept;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

// Canonical feature order. Profile gating removes video_download on edx_like
// and chapter_view on coursera_like.
const std::vector<std::string>& all_feature_names();
std::vector<std::string> feature_names_for(PlatformProfile profile);
// video_view, video_download|chapter_view, total_attempts
std::vector<std::string> behavioral_feature_names(PlatformProfile profile);
// The six graph-derived features.
const std::vector<std::string>& social_feature_names();

struct ActivityCounts {
  std::int64_t video_view = 0;
  std::int64_t video_download = 0;
  std::int64_t chapter_view = 0;
  std::int64_t total_attempts = 0;
  std::int64_t total_posts = 0;
  std::int64_t total_comments = 0;
  std::int64_t votes = 0;  // received: upvotes − downvotes

  friend bool operator==(const ActivityCounts&, const ActivityCounts&) = default;
};

// Cumulative counts of everything strictly before the end of `week`, for every
// student with an event or an authored post in that span. Post-level vote
// tallies have no timestamps and count from the week of the post; vote_cast
// events count from their own timestamp.
std::map<std::string, ActivityCounts> behavioral_forum_features(const CourseData& data, int week,
                                                                const CourseConfig& config);

// Highest week index of any event, per student with at least one event.
std::map<std::string, int> last_active_week(const CourseData& data, const CourseConfig& config);

// Labels for every student with at least one event, evaluated at `week`.
//   semester_dropout   = last active week <= W - 2
//   week_dropout       = last active week <= week
//   inactive_next_week = no event in week + 1 (false at week W)
//   certificate        = outcome row says so (false when absent)
std::map<std::string, LabelSet> compute_labels(const CourseData& data, const CourseConfig& config, int week);

struct WeeklyFeatureTable {
  std::string course_id;
  int week = 0;
  GraphKind graph_kind = GraphKind::type1;
  std::vector<std::string> feature_names;
  std::vector<std::string> students;           // sorted
  std::vector<std::vector<double>> rows;       // rows[i][j] = feature j of students[i]
  std::vector<LabelSet> labels;                // parallel to students
  std::vector<bool> in_graph;                  // parallel to students

  std::size_t feature_index(std::string_view name) const;  // throws SchemaError
  bool has_feature(std::string_view name) const noexcept;
  std::vector<double> column(std::string_view name) const;
  std::size_t size() const noexcept { return students.size(); }
};

// Joins cumulative activity, social metrics from the week-`week` graph of the
// requested kind, and labels. Rows are the non-staff students with at least one
// event before the end of `week`; students off the graph get zero social
// features.
WeeklyFeatureTable assemble_weekly(const CourseData& data, const CourseConfig& config, int week, GraphKind kind);

// One row per student: student_id, features (6 decimals), labels (0/1).
std::string table_csv(const WeeklyFeatureTable& table);

}  // namespace attrition
