#pragma once

// Course event logs, forum dumps and outcome records: parsing, validation,
// on-schedule filtering and the per-course summary table.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace attrition {

using Timestamp = std::int64_t;  // UTC seconds

inline constexpr Timestamp kSecondsPerDay = 86'400;
inline constexpr Timestamp kSecondsPerWeek = 7 * kSecondsPerDay;

enum class EventType { video_view, video_download, chapter_view, submission, post, comment, vote_cast };

std::string_view to_string(EventType t) noexcept;
EventType parse_event_type(std::string_view s);  // throws DataError

// Forum-linked events carry a thread id; only votes carry a vote value.
bool is_forum_event(EventType t) noexcept;

enum class PlatformProfile { coursera_like, edx_like };

std::string_view to_string(PlatformProfile p) noexcept;
PlatformProfile parse_profile(std::string_view s);  // throws DataError

struct EventRecord {
  std::string student_id;
  EventType event_type = EventType::video_view;
  Timestamp timestamp = 0;
  std::optional<std::string> thread_id;
  std::optional<std::string> post_id;
  std::optional<int> vote_value;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct CourseConfig {
  std::string course_id;
  PlatformProfile platform_profile = PlatformProfile::coursera_like;
  Timestamp start_time = 0;
  int num_weeks = 6;
  std::set<std::string> staff_ids;

  Timestamp end_time() const noexcept { return start_time + kSecondsPerWeek * num_weeks; }
  bool in_window(Timestamp t) const noexcept { return t >= start_time && t < end_time(); }
  bool is_staff(const std::string& id) const { return staff_ids.count(id) != 0; }

  friend bool operator==(const CourseConfig&, const CourseConfig&) = default;
};

struct StudentOutcome {
  std::string student_id;
  std::optional<double> final_grade;
  bool certificate = false;

  friend bool operator==(const StudentOutcome&, const StudentOutcome&) = default;
};

struct ForumPost {
  std::string post_id;
  std::string thread_id;
  std::string author_id;
  Timestamp timestamp = 0;
  std::optional<std::string> parent_post_id;
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;

  bool is_root() const noexcept { return !parent_post_id.has_value(); }

  friend bool operator==(const ForumPost&, const ForumPost&) = default;
};

// A thread's posts in contribution order: ascending timestamp, ties broken by
// post_id. `root` indexes the unique parentless post.
struct Thread {
  std::string thread_id;
  std::vector<ForumPost> posts;
  std::size_t root = 0;

  const ForumPost& root_post() const { return posts.at(root); }

  friend bool operator==(const Thread&, const Thread&) = default;
};

// Immutable after load: events sorted by timestamp (stable), threads by id,
// outcomes by student id.
struct CourseData {
  std::vector<EventRecord> events;
  std::vector<Thread> threads;
  std::vector<StudentOutcome> outcomes;

  std::size_t post_count() const noexcept;

  friend bool operator==(const CourseData&, const CourseData&) = default;
};

// ---- parsing -------------------------------------------------------------

std::vector<EventRecord> parse_events(std::istream& in, const std::string& source = "events");
std::vector<ForumPost> parse_forum(std::istream& in, const std::string& source = "forum");
std::vector<StudentOutcome> parse_outcomes(std::istream& in, const std::string& source = "outcomes");
CourseConfig parse_config(std::istream& in, const std::string& source = "config");

CourseConfig read_config(const std::filesystem::path& path);

// "2013-10-24T00:00:00Z", "2013-10-24T02:00:00+02:00", "2013-10-24".
Timestamp parse_iso8601(std::string_view s);
std::string format_iso8601(Timestamp t);

// Validates the forum invariants and groups posts into threads. Throws
// IntegrityError on duplicate post ids, orphan or cross-thread parents, a thread
// without exactly one root, parent cycles, or a reply older than its parent.
std::vector<Thread> assemble_threads(std::vector<ForumPost> posts);

// Reads and cross-validates the three course files. Vote events must name an
// existing post.
CourseData load_course(const std::filesystem::path& events_path, const std::filesystem::path& forum_path,
                       const std::filesystem::path& outcomes_path, const CourseConfig& config);

CourseData make_course(std::vector<EventRecord> events, std::vector<ForumPost> posts,
                       std::vector<StudentOutcome> outcomes);

// ---- serialisation (inverse of the parsers) -------------------------------

void write_events(std::ostream& out, const std::vector<EventRecord>& events);
void write_forum(std::ostream& out, const std::vector<Thread>& threads);
void write_outcomes(std::ostream& out, const std::vector<StudentOutcome>& outcomes);
void write_config(std::ostream& out, const CourseConfig& config);

struct CoursePaths {
  std::filesystem::path events, forum, outcomes, config;

  static CoursePaths in_directory(const std::filesystem::path& dir);
};

void save_course(const CoursePaths& paths, const CourseData& data, const CourseConfig& config);

// ---- course-level queries -------------------------------------------------

struct FilterResult {
  CourseData data;
  std::vector<std::string> excluded;  // sorted
};

// Drops every student with any event or forum post outside
// [start_time, start_time + 7·W days): their events, posts and outcome row.
// Replies to a dropped post are re-attached to its nearest surviving ancestor;
// if a thread loses its root, its earliest surviving post becomes the root.
FilterResult filter_on_schedule(const CourseData& data, const CourseConfig& config);

// Students with at least one event of any type.
std::set<std::string> active_students(const CourseData& data);

// 1 + floor((t - start) / 7 days). Throws RangeError outside the window.
int week_of(Timestamp t, const CourseConfig& config);

// Exclusive end of week w (1-based).
inline Timestamp week_end(int week, const CourseConfig& config) noexcept {
  return config.start_time + kSecondsPerWeek * week;
}

struct SummaryReport {
  std::size_t enrolled = 0;
  std::size_t forum_active = 0;
  std::size_t with_submissions = 0;
  std::size_t forum_posts = 0;
  std::size_t with_activity = 0;
  std::size_t nonzero_grades = 0;
  std::size_t certificates = 0;
  std::size_t thread_count = 0;
  double thread_avg_length = 0.0;
  std::size_t thread_max_length = 0;
  std::size_t thread_min_length = 0;

  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

SummaryReport dataset_summary(const CourseData& data);
std::string summary_csv(const std::string& course_id, const SummaryReport& report);

}  // namespace attrition
