#include "attrition/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"

namespace attrition {

using nlohmann::json;

namespace {

constexpr std::pair<EventType, std::string_view> kEventNames[] = {
    {EventType::video_view, "video_view"}, {EventType::video_download, "video_download"},
    {EventType::chapter_view, "chapter_view"}, {EventType::submission, "submission"},
    {EventType::post, "post"}, {EventType::comment, "comment"}, {EventType::vote_cast, "vote_cast"},
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  return in;
}

// JSON field helpers. `where` closes over source and line for messages.
struct JsonRow {
  const json& obj;
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line, what); }

  const json* find(const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string required_string(const char* key) const {
    const json* v = find(key);
    if (!v) fail(std::string("missing field '") + key + "'");
    if (!v->is_string()) fail(std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
  }

  std::optional<std::string> optional_string(const char* key) const {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
  }

  Timestamp timestamp(const char* key) const {
    const json* v = find(key);
    if (!v) fail(std::string("missing field '") + key + "'");
    if (v->is_number_integer()) return v->get<Timestamp>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (!std::isfinite(d)) fail(std::string("field '") + key + "' is not finite");
      return static_cast<Timestamp>(std::floor(d));
    }
    if (v->is_string()) {
      try {
        return parse_iso8601(v->get<std::string>());
      } catch (const DataError& e) {
        fail(e.what());
      }
    }
    fail(std::string("field '") + key + "' must be a number of seconds");
  }

  std::optional<std::int64_t> optional_int(const char* key) const {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return v->get<std::int64_t>();
  }
};

template <typename F>
void for_each_json_line(std::istream& in, const std::string& source, F&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(source, lineno, "expected a JSON object");
    fn(JsonRow{obj, source, lineno});
  }
}

}  // namespace

std::string_view to_string(EventType t) noexcept {
  for (const auto& [type, name] : kEventNames) {
    if (type == t) return name;
  }
  return "unknown";
}

EventType parse_event_type(std::string_view s) {
  for (const auto& [type, name] : kEventNames) {
    if (name == s) return type;
  }
  throw DataError("unknown event_type '" + std::string(s) + "'");
}

bool is_forum_event(EventType t) noexcept {
  return t == EventType::post || t == EventType::comment || t == EventType::vote_cast;
}

std::string_view to_string(PlatformProfile p) noexcept {
  return p == PlatformProfile::coursera_like ? "coursera_like" : "edx_like";
}

PlatformProfile parse_profile(std::string_view s) {
  if (s == "coursera_like") return PlatformProfile::coursera_like;
  if (s == "edx_like") return PlatformProfile::edx_like;
  throw DataError("unknown platform_profile '" + std::string(s) + "'");
}

std::size_t CourseData::post_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : threads) n += t.posts.size();
  return n;
}

// ---------------------------------------------------------------------------
// Timestamps

Timestamp parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  const std::string text = trim(s);
  auto bad = [&]() -> DataError { return DataError("invalid ISO-8601 timestamp '" + text + "'"); };

  auto digits = [&](std::size_t pos, std::size_t len) -> int {
    if (pos + len > text.size()) throw bad();
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') throw bad();
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };

  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  const int y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw bad();
  Timestamp t = sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;

  std::size_t pos = 10;
  if (pos == text.size()) return t;
  if (text[pos] != 'T' && text[pos] != ' ') throw bad();
  const int hh = digits(pos + 1, 2);
  if (text.size() < pos + 6 || text[pos + 3] != ':') throw bad();
  const int mm = digits(pos + 4, 2);
  int ss = 0;
  pos += 6;
  if (pos < text.size() && text[pos] == ':') {
    ss = digits(pos + 1, 2);
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {  // fractional seconds are truncated
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) throw bad();
  t += hh * 3600 + mm * 60 + ss;

  if (pos == text.size()) return t;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return t;
  if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
    const int offset = digits(pos + 1, 2) * 3600 + digits(pos + 4, 2) * 60;
    return text[pos] == '+' ? t - offset : t + offset;
  }
  throw bad();
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto days_since = static_cast<int>(std::floor(static_cast<double>(t) / kSecondsPerDay));
  const sys_days day_point{days{days_since}};
  const year_month_day ymd{day_point};
  const Timestamp rem = t - static_cast<Timestamp>(days_since) * kSecondsPerDay;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsers

std::vector<EventRecord> parse_events(std::istream& in, const std::string& source) {
  std::vector<EventRecord> events;
  for_each_json_line(in, source, [&](const JsonRow& row) {
    EventRecord e;
    e.student_id = row.required_string("student_id");
    try {
      e.event_type = parse_event_type(row.required_string("event_type"));
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& err) {
      row.fail(err.what());
    }
    e.timestamp = row.timestamp("timestamp");
    e.thread_id = row.optional_string("thread_id");
    e.post_id = row.optional_string("post_id");
    if (auto v = row.optional_int("vote_value")) e.vote_value = static_cast<int>(*v);

    const bool forum = is_forum_event(e.event_type);
    if (forum != e.thread_id.has_value()) {
      row.fail(forum ? "forum event without thread_id" : "thread_id on a non-forum event");
    }
    if (e.post_id && !forum) row.fail("post_id on a non-forum event");
    const bool vote = e.event_type == EventType::vote_cast;
    if (vote != e.vote_value.has_value()) {
      row.fail(vote ? "vote_cast without vote_value" : "vote_value on a non-vote event");
    }
    if (vote && *e.vote_value != 1 && *e.vote_value != -1) row.fail("vote_value must be -1 or +1");
    if (vote && !e.post_id) row.fail("vote_cast without post_id");
    events.push_back(std::move(e));
  });
  return events;
}

std::vector<ForumPost> parse_forum(std::istream& in, const std::string& source) {
  std::vector<ForumPost> posts;
  for_each_json_line(in, source, [&](const JsonRow& row) {
    ForumPost p;
    p.post_id = row.required_string("post_id");
    p.thread_id = row.required_string("thread_id");
    p.author_id = row.required_string("author_id");
    p.timestamp = row.timestamp("timestamp");
    p.parent_post_id = row.optional_string("parent_post_id");
    p.upvotes = row.optional_int("upvotes").value_or(0);
    p.downvotes = row.optional_int("downvotes").value_or(0);
    if (p.upvotes < 0 || p.downvotes < 0) row.fail("vote counts must be non-negative");
    posts.push_back(std::move(p));
  });
  return posts;
}

std::vector<StudentOutcome> parse_outcomes(std::istream& in, const std::string& source) {
  std::vector<StudentOutcome> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_line(line);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, e.what());
    }
    for (auto& f : fields) f = trim(f);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"student_id", "final_grade", "certificate"}) {
        throw ParseError(source, lineno, "expected header student_id,final_grade,certificate");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(source, lineno, "expected 3 columns");
    StudentOutcome o;
    o.student_id = fields[0];
    if (o.student_id.empty()) throw ParseError(source, lineno, "empty student_id");
    if (!fields[1].empty()) {
      double g = 0.0;
      auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), g);
      if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size() || !std::isfinite(g)) {
        throw ParseError(source, lineno, "final_grade is not a number");
      }
      if (g < 0.0 || g > 1.0) throw ParseError(source, lineno, "final_grade outside [0,1]");
      o.final_grade = g;
    }
    const std::string& c = fields[2];
    if (c == "1" || c == "true" || c == "True" || c == "TRUE") {
      o.certificate = true;
    } else if (c == "0" || c == "false" || c == "False" || c == "FALSE") {
      o.certificate = false;
    } else {
      throw ParseError(source, lineno, "certificate must be a boolean");
    }
    if (o.certificate && !(o.final_grade && *o.final_grade > 0.0)) {
      throw IntegrityError(source + ":" + std::to_string(lineno) + ": certificate without a positive grade");
    }
    if (!seen.insert(o.student_id).second) {
      throw IntegrityError(source + ":" + std::to_string(lineno) + ": duplicate student_id " + o.student_id);
    }
    out.push_back(std::move(o));
  }
  std::sort(out.begin(), out.end(),
            [](const StudentOutcome& a, const StudentOutcome& b) { return a.student_id < b.student_id; });
  return out;
}

CourseConfig parse_config(std::istream& in, const std::string& source) {
  CourseConfig cfg;
  bool have_id = false, have_profile = false, have_start = false, have_weeks = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "course_id") {
        cfg.course_id = value;
        have_id = true;
      } else if (key == "platform_profile") {
        cfg.platform_profile = parse_profile(value);
        have_profile = true;
      } else if (key == "start_time") {
        cfg.start_time = parse_iso8601(value);
        have_start = true;
      } else if (key == "num_weeks") {
        int w = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
        if (ec != std::errc{} || ptr != value.data() + value.size()) throw DataError("num_weeks must be an integer");
        if (w < 2) throw DataError("num_weeks must be at least 2");
        cfg.num_weeks = w;
        have_weeks = true;
      } else if (key == "staff_ids") {
        std::stringstream ss(value);
        std::string id;
        while (std::getline(ss, id, ',')) {
          id = trim(id);
          if (!id.empty()) cfg.staff_ids.insert(id);
        }
      } else {
        throw DataError("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  if (!have_id || !have_profile || !have_start || !have_weeks) {
    throw ParseError(source, lineno, "config requires course_id, platform_profile, start_time and num_weeks");
  }
  return cfg;
}

CourseConfig read_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_config(in, path.string());
}

// ---------------------------------------------------------------------------
// Threads

std::vector<Thread> assemble_threads(std::vector<ForumPost> posts) {
  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!by_id.emplace(posts[i].post_id, i).second) {
      throw IntegrityError("duplicate post_id " + posts[i].post_id);
    }
  }
  for (const auto& p : posts) {
    if (!p.parent_post_id) continue;
    auto it = by_id.find(*p.parent_post_id);
    if (it == by_id.end()) {
      throw IntegrityError("post " + p.post_id + " references missing parent " + *p.parent_post_id);
    }
    const ForumPost& parent = posts[it->second];
    if (parent.thread_id != p.thread_id) {
      throw IntegrityError("post " + p.post_id + " replies across threads");
    }
    if (p.timestamp < parent.timestamp) {
      throw IntegrityError("post " + p.post_id + " is older than its parent " + parent.post_id);
    }
  }
  // Every chain must terminate at a root within posts.size() steps.
  for (const auto& p : posts) {
    const ForumPost* cur = &p;
    std::size_t steps = 0;
    while (cur->parent_post_id) {
      cur = &posts[by_id.at(*cur->parent_post_id)];
      if (++steps > posts.size()) throw IntegrityError("parent cycle through post " + p.post_id);
    }
  }

  std::map<std::string, std::vector<ForumPost>> grouped;
  for (auto& p : posts) grouped[p.thread_id].push_back(std::move(p));

  std::vector<Thread> threads;
  threads.reserve(grouped.size());
  for (auto& [tid, list] : grouped) {
    std::sort(list.begin(), list.end(), [](const ForumPost& a, const ForumPost& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.post_id < b.post_id;
    });
    Thread t;
    t.thread_id = tid;
    std::size_t roots = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].is_root()) {
        t.root = i;
        ++roots;
      }
    }
    if (roots != 1) {
      throw IntegrityError("thread " + tid + " has " + std::to_string(roots) + " root posts");
    }
    t.posts = std::move(list);
    threads.push_back(std::move(t));
  }
  return threads;
}

CourseData make_course(std::vector<EventRecord> events, std::vector<ForumPost> posts,
                       std::vector<StudentOutcome> outcomes) {
  CourseData data;
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
  data.threads = assemble_threads(std::move(posts));

  std::unordered_set<std::string> post_ids;
  for (const auto& t : data.threads) {
    for (const auto& p : t.posts) post_ids.insert(p.post_id);
  }
  for (const auto& e : events) {
    if (e.event_type == EventType::vote_cast && !post_ids.count(*e.post_id)) {
      throw IntegrityError("vote by " + e.student_id + " targets unknown post " + *e.post_id);
    }
  }
  data.events = std::move(events);
  std::sort(outcomes.begin(), outcomes.end(),
            [](const StudentOutcome& a, const StudentOutcome& b) { return a.student_id < b.student_id; });
  data.outcomes = std::move(outcomes);
  return data;
}

CourseData load_course(const std::filesystem::path& events_path, const std::filesystem::path& forum_path,
                       const std::filesystem::path& outcomes_path, const CourseConfig& /*config*/) {
  auto ev_in = open_input(events_path);
  auto events = parse_events(ev_in, events_path.string());
  auto fo_in = open_input(forum_path);
  auto posts = parse_forum(fo_in, forum_path.string());
  auto oc_in = open_input(outcomes_path);
  auto outcomes = parse_outcomes(oc_in, outcomes_path.string());
  return make_course(std::move(events), std::move(posts), std::move(outcomes));
}

// ---------------------------------------------------------------------------
// Writers

void write_events(std::ostream& out, const std::vector<EventRecord>& events) {
  for (const auto& e : events) {
    json j = json::object();
    j["student_id"] = e.student_id;
    j["event_type"] = std::string(to_string(e.event_type));
    j["timestamp"] = e.timestamp;
    if (e.thread_id) j["thread_id"] = *e.thread_id;
    if (e.post_id) j["post_id"] = *e.post_id;
    if (e.vote_value) j["vote_value"] = *e.vote_value;
    out << j.dump() << '\n';
  }
}

void write_forum(std::ostream& out, const std::vector<Thread>& threads) {
  for (const auto& t : threads) {
    for (const auto& p : t.posts) {
      json j = json::object();
      j["post_id"] = p.post_id;
      j["thread_id"] = p.thread_id;
      j["author_id"] = p.author_id;
      j["timestamp"] = p.timestamp;
      if (p.parent_post_id) j["parent_post_id"] = *p.parent_post_id;
      j["upvotes"] = p.upvotes;
      j["downvotes"] = p.downvotes;
      out << j.dump() << '\n';
    }
  }
}

void write_outcomes(std::ostream& out, const std::vector<StudentOutcome>& outcomes) {
  out << "student_id,final_grade,certificate\n";
  for (const auto& o : outcomes) {
    out << csv::escape(o.student_id) << ',' << (o.final_grade ? format_double(*o.final_grade) : std::string())
        << ',' << (o.certificate ? "1" : "0") << '\n';
  }
}

void write_config(std::ostream& out, const CourseConfig& config) {
  out << "course_id=" << config.course_id << '\n'
      << "platform_profile=" << to_string(config.platform_profile) << '\n'
      << "start_time=" << format_iso8601(config.start_time) << '\n'
      << "num_weeks=" << config.num_weeks << '\n'
      << "staff_ids=";
  bool first = true;
  for (const auto& s : config.staff_ids) {
    if (!first) out << ',';
    out << s;
    first = false;
  }
  out << '\n';
}

CoursePaths CoursePaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "events.jsonl", dir / "forum.jsonl", dir / "outcomes.csv", dir / "course.cfg"};
}

void save_course(const CoursePaths& paths, const CourseData& data, const CourseConfig& config) {
  std::ostringstream ev, fo, oc, cf;
  write_events(ev, data.events);
  write_forum(fo, data.threads);
  write_outcomes(oc, data.outcomes);
  write_config(cf, config);
  csv::write_text(paths.events, ev.str());
  csv::write_text(paths.forum, fo.str());
  csv::write_text(paths.outcomes, oc.str());
  csv::write_text(paths.config, cf.str());
}

// ---------------------------------------------------------------------------
// Queries

FilterResult filter_on_schedule(const CourseData& data, const CourseConfig& config) {
  std::set<std::string> excluded;
  for (const auto& e : data.events) {
    if (!config.in_window(e.timestamp)) excluded.insert(e.student_id);
  }
  for (const auto& t : data.threads) {
    for (const auto& p : t.posts) {
      if (!config.in_window(p.timestamp)) excluded.insert(p.author_id);
    }
  }

  FilterResult result;
  result.excluded.assign(excluded.begin(), excluded.end());
  if (excluded.empty()) {
    result.data = data;
    return result;
  }

  std::unordered_set<std::string> removed_posts;
  std::vector<ForumPost> kept_posts;
  for (const auto& t : data.threads) {
    std::unordered_map<std::string, const ForumPost*> by_id;
    for (const auto& p : t.posts) by_id.emplace(p.post_id, &p);
    auto survives = [&](const ForumPost& p) { return excluded.count(p.author_id) == 0; };

    std::vector<ForumPost> survivors;
    std::vector<std::size_t> orphan_tops;
    for (const auto& p : t.posts) {
      if (!survives(p)) {
        removed_posts.insert(p.post_id);
        continue;
      }
      ForumPost copy = p;
      const ForumPost* anc = p.parent_post_id ? by_id.at(*p.parent_post_id) : nullptr;
      while (anc && !survives(*anc)) {
        anc = anc->parent_post_id ? by_id.at(*anc->parent_post_id) : nullptr;
      }
      if (anc) {
        copy.parent_post_id = anc->post_id;
      } else {
        copy.parent_post_id.reset();
        orphan_tops.push_back(survivors.size());
      }
      survivors.push_back(std::move(copy));
    }
    if (!orphan_tops.empty()) {
      // survivors are still in contribution order, so the first orphan top is the earliest.
      const std::string new_root = survivors[orphan_tops.front()].post_id;
      for (std::size_t k = 1; k < orphan_tops.size(); ++k) survivors[orphan_tops[k]].parent_post_id = new_root;
    }
    for (auto& p : survivors) kept_posts.push_back(std::move(p));
  }

  std::vector<EventRecord> events;
  for (const auto& e : data.events) {
    if (excluded.count(e.student_id)) continue;
    if (e.event_type == EventType::vote_cast && removed_posts.count(*e.post_id)) continue;
    events.push_back(e);
  }
  std::vector<StudentOutcome> outcomes;
  for (const auto& o : data.outcomes) {
    if (!excluded.count(o.student_id)) outcomes.push_back(o);
  }
  result.data = make_course(std::move(events), std::move(kept_posts), std::move(outcomes));
  return result;
}

std::set<std::string> active_students(const CourseData& data) {
  std::set<std::string> out;
  for (const auto& e : data.events) out.insert(e.student_id);
  return out;
}

int week_of(Timestamp t, const CourseConfig& config) {
  if (!config.in_window(t)) {
    throw RangeError("timestamp " + std::to_string(t) + " outside course window [" +
                     std::to_string(config.start_time) + ", " + std::to_string(config.end_time()) + ")");
  }
  return 1 + static_cast<int>((t - config.start_time) / kSecondsPerWeek);
}

SummaryReport dataset_summary(const CourseData& data) {
  SummaryReport r;
  r.enrolled = data.outcomes.size();
  std::set<std::string> forum_active, submitters;
  for (const auto& t : data.threads) {
    for (const auto& p : t.posts) forum_active.insert(p.author_id);
  }
  for (const auto& e : data.events) {
    if (e.event_type == EventType::submission) submitters.insert(e.student_id);
  }
  r.forum_active = forum_active.size();
  r.with_submissions = submitters.size();
  r.forum_posts = data.post_count();
  r.with_activity = active_students(data).size();
  for (const auto& o : data.outcomes) {
    if (o.final_grade.value_or(0.0) > 0.0) ++r.nonzero_grades;
    if (o.certificate) ++r.certificates;
  }
  r.thread_count = data.threads.size();
  if (!data.threads.empty()) {
    r.thread_min_length = data.threads.front().posts.size();
    for (const auto& t : data.threads) {
      r.thread_max_length = std::max(r.thread_max_length, t.posts.size());
      r.thread_min_length = std::min(r.thread_min_length, t.posts.size());
    }
    r.thread_avg_length = static_cast<double>(r.forum_posts) / static_cast<double>(r.thread_count);
  }
  return r;
}

std::string summary_csv(const std::string& course_id, const SummaryReport& r) {
  std::ostringstream out;
  out << "course_id,enrolled,forum_active,with_submissions,forum_posts,with_activity,nonzero_grades,"
         "certificates,thread_count,thread_avg_length,thread_max_length,thread_min_length\n";
  out << csv::escape(course_id) << ',' << r.enrolled << ',' << r.forum_active << ',' << r.with_submissions << ','
      << r.forum_posts << ',' << r.with_activity << ',' << r.nonzero_grades << ',' << r.certificates << ','
      << r.thread_count << ',' << csv::fixed6(r.thread_avg_length) << ',' << r.thread_max_length << ','
      << r.thread_min_length << '\n';
  return out.str();
}

}  // namespace attrition
