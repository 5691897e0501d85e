#include "attrition/featurize.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"
#include "attrition/graph_metrics.hpp"

namespace attrition {

std::string_view to_string(Target t) noexcept {
  switch (t) {
    case Target::semester_dropout: return "semester_dropout";
    case Target::week_dropout: return "week_dropout";
    case Target::inactive_next_week: return "inactive_next_week";
    case Target::certificate: return "certificate";
  }
  return "unknown";
}

Target parse_target(std::string_view s) {
  for (Target t : kAllTargets) {
    if (to_string(t) == s) return t;
  }
  throw UsageError("unknown target '" + std::string(s) + "'");
}

bool LabelSet::get(Target t) const noexcept {
  switch (t) {
    case Target::semester_dropout: return semester_dropout;
    case Target::week_dropout: return week_dropout;
    case Target::inactive_next_week: return inactive_next_week;
    case Target::certificate: return certificate;
  }
  return false;
}

const std::vector<std::string>& all_feature_names() {
  static const std::vector<std::string> names{
      "video_view", "video_download", "chapter_view", "total_attempts", "total_posts",
      "total_comments", "votes", "betweenness", "hub", "authority",
      "in_degree", "out_degree", "dropped_out_neighbors"};
  return names;
}

std::vector<std::string> feature_names_for(PlatformProfile profile) {
  std::vector<std::string> out;
  for (const auto& name : all_feature_names()) {
    if (name == "video_download" && profile != PlatformProfile::coursera_like) continue;
    if (name == "chapter_view" && profile != PlatformProfile::edx_like) continue;
    out.push_back(name);
  }
  return out;
}

std::vector<std::string> behavioral_feature_names(PlatformProfile profile) {
  return {"video_view", profile == PlatformProfile::coursera_like ? "video_download" : "chapter_view",
          "total_attempts"};
}

const std::vector<std::string>& social_feature_names() {
  static const std::vector<std::string> names{"betweenness", "hub", "authority",
                                              "in_degree", "out_degree", "dropped_out_neighbors"};
  return names;
}

std::map<std::string, ActivityCounts> behavioral_forum_features(const CourseData& data, int week,
                                                                const CourseConfig& config) {
  const Timestamp cutoff = week_end(week, config);
  std::map<std::string, ActivityCounts> out;
  std::unordered_map<std::string, const ForumPost*> posts;
  for (const auto& t : data.threads) {
    for (const auto& p : t.posts) {
      posts.emplace(p.post_id, &p);
      if (p.timestamp >= cutoff) continue;
      out[p.author_id].votes += p.upvotes - p.downvotes;
    }
  }
  for (const auto& e : data.events) {
    if (e.timestamp >= cutoff) continue;  // events are sorted, but votes may target later posts
    if (e.event_type == EventType::vote_cast) {
      const ForumPost& target = *posts.at(*e.post_id);
      if (target.timestamp < cutoff) out[target.author_id].votes += *e.vote_value;
      out[e.student_id];  // the voter is active too
      continue;
    }
    ActivityCounts& c = out[e.student_id];
    switch (e.event_type) {
      case EventType::video_view: ++c.video_view; break;
      case EventType::video_download: ++c.video_download; break;
      case EventType::chapter_view: ++c.chapter_view; break;
      case EventType::submission: ++c.total_attempts; break;
      case EventType::post: ++c.total_posts; break;
      case EventType::comment: ++c.total_comments; break;
      case EventType::vote_cast: break;
    }
  }
  return out;
}

std::map<std::string, int> last_active_week(const CourseData& data, const CourseConfig& config) {
  std::map<std::string, int> out;
  for (const auto& e : data.events) {
    const int w = week_of(e.timestamp, config);
    auto [it, inserted] = out.emplace(e.student_id, w);
    if (!inserted) it->second = std::max(it->second, w);
  }
  return out;
}

std::map<std::string, LabelSet> compute_labels(const CourseData& data, const CourseConfig& config, int week) {
  const int W = config.num_weeks;
  if (week < 1 || week > W) throw UsageError("week " + std::to_string(week) + " outside 1.." + std::to_string(W));

  std::map<std::string, std::set<int>> active_weeks;
  for (const auto& e : data.events) active_weeks[e.student_id].insert(week_of(e.timestamp, config));
  std::unordered_map<std::string, bool> certified;
  for (const auto& o : data.outcomes) certified.emplace(o.student_id, o.certificate);

  std::map<std::string, LabelSet> out;
  for (const auto& [id, weeks] : active_weeks) {
    const int last = *weeks.rbegin();
    LabelSet l;
    l.semester_dropout = last <= W - 2;
    l.week_dropout = last <= week;
    l.inactive_next_week = week < W && weeks.count(week + 1) == 0;
    auto it = certified.find(id);
    l.certificate = it != certified.end() && it->second;
    out.emplace(id, l);
  }
  return out;
}

std::size_t WeeklyFeatureTable::feature_index(std::string_view name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw SchemaError("feature '" + std::string(name) + "' not in table");
  return static_cast<std::size_t>(it - feature_names.begin());
}

bool WeeklyFeatureTable::has_feature(std::string_view name) const noexcept {
  return std::find(feature_names.begin(), feature_names.end(), name) != feature_names.end();
}

std::vector<double> WeeklyFeatureTable::column(std::string_view name) const {
  const std::size_t j = feature_index(name);
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
  return out;
}

WeeklyFeatureTable assemble_weekly(const CourseData& data, const CourseConfig& config, int week, GraphKind kind) {
  WeeklyFeatureTable table;
  table.course_id = config.course_id;
  table.week = week;
  table.graph_kind = kind;
  table.feature_names = feature_names_for(config.platform_profile);

  const auto labels = compute_labels(data, config, week);
  const auto counts = behavioral_forum_features(data, week, config);
  const InteractionGraph graph = build_graph(data.threads, kind, week, config);
  const auto btw = betweenness(graph);
  const auto hub_auth = hits(graph);
  const auto deg = degrees(graph);
  const auto dropped = dropped_out_neighbors(graph, last_active_week(data, config), week);

  const Timestamp cutoff = week_end(week, config);
  std::set<std::string> members;
  for (const auto& e : data.events) {
    if (e.timestamp < cutoff && !config.is_staff(e.student_id)) members.insert(e.student_id);
  }

  for (const auto& id : members) {
    const ActivityCounts c = counts.count(id) ? counts.at(id) : ActivityCounts{};
    const bool on_graph = graph.has_node(id);
    std::vector<double> row;
    row.reserve(table.feature_names.size());
    for (const auto& name : table.feature_names) {
      double v = 0.0;
      if (name == "video_view") v = static_cast<double>(c.video_view);
      else if (name == "video_download") v = static_cast<double>(c.video_download);
      else if (name == "chapter_view") v = static_cast<double>(c.chapter_view);
      else if (name == "total_attempts") v = static_cast<double>(c.total_attempts);
      else if (name == "total_posts") v = static_cast<double>(c.total_posts);
      else if (name == "total_comments") v = static_cast<double>(c.total_comments);
      else if (name == "votes") v = static_cast<double>(c.votes);
      else if (on_graph) {
        if (name == "betweenness") v = btw.at(id);
        else if (name == "hub") v = hub_auth.hub.at(id);
        else if (name == "authority") v = hub_auth.authority.at(id);
        else if (name == "in_degree") v = static_cast<double>(deg.at(id).in);
        else if (name == "out_degree") v = static_cast<double>(deg.at(id).out);
        else if (name == "dropped_out_neighbors") v = dropped.at(id);
      }
      row.push_back(v);
    }
    table.students.push_back(id);
    table.rows.push_back(std::move(row));
    table.labels.push_back(labels.at(id));
    table.in_graph.push_back(on_graph);
  }
  return table;
}

std::string table_csv(const WeeklyFeatureTable& table) {
  std::ostringstream out;
  out << "student_id";
  for (const auto& f : table.feature_names) out << ',' << f;
  for (Target t : kAllTargets) out << ',' << to_string(t);
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << csv::escape(table.students[i]);
    for (double v : table.rows[i]) out << ',' << csv::fixed6(v);
    for (Target t : kAllTargets) out << ',' << (table.labels[i].get(t) ? 1 : 0);
    out << '\n';
  }
  return out.str();
}

}  // namespace attrition
