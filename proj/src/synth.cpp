#include "attrition/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"

namespace attrition {

namespace {

// Salts separating the random streams of one course.
constexpr std::uint64_t kBehaviourSalt = 0x1000;
constexpr std::uint64_t kProfileSalt = 0x2000;
constexpr std::uint64_t kForumSalt = 0x3000;

std::string student_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06zu", i + 1);
  return buf;
}

std::string staff_name(std::size_t i) { return "staff" + std::to_string(i + 1); }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Timestamp uniform_time(std::mt19937_64& rng, Timestamp lo, Timestamp hi) {
  return std::uniform_int_distribution<Timestamp>(lo, hi - 1)(rng);
}

std::size_t weighted_pick(std::mt19937_64& rng, const std::vector<std::size_t>& pool,
                          const std::vector<double>& weight) {
  double total = 0.0;
  for (std::size_t s : pool) total += weight[s];
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t s : pool) {
    u -= weight[s];
    if (u < 0.0) return s;
  }
  return pool.back();
}

struct StudentState {
  std::mt19937_64 behaviour;
  std::mt19937_64 profile;
  double engagement = 0.0;
  bool active = true;
  bool forum = false;
  int submissions = 0;
};

}  // namespace

void validate(const SynthConfig& c) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(name) + " must be in [0,1]");
  };
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw UsageError(std::string(name) + " must be a non-negative rate");
  };
  if (c.num_weeks < 2) throw UsageError("num_weeks must be at least 2");
  prob(c.forum_probability, "forum_probability");
  prob(c.staff_reply_probability, "staff_reply_probability");
  rate(c.video_rate, "video_rate");
  rate(c.profile_rate, "profile_rate");
  rate(c.submission_rate, "submission_rate");
  rate(c.threads_per_week, "threads_per_week");
  rate(c.replies_per_thread, "replies_per_thread");
  rate(c.upvote_rate, "upvote_rate");
  rate(c.downvote_rate, "downvote_rate");
  if (!(c.engagement_log_sd >= 0.0)) throw UsageError("engagement_log_sd must be non-negative");
  if (c.certificate_threshold < 1) throw UsageError("certificate_threshold must be at least 1");
}

SynthCourse generate_course(const SynthConfig& cfg) {
  validate(cfg);
  SynthCourse course;
  course.config.course_id = cfg.course_id;
  course.config.platform_profile = cfg.profile;
  course.config.start_time = cfg.start_time;
  course.config.num_weeks = cfg.num_weeks;
  for (std::size_t k = 0; k < cfg.n_staff; ++k) course.config.staff_ids.insert(staff_name(k));
  course.truth.hazard = cfg.hazard;

  const std::size_t n = cfg.n_students;
  const EventType profile_event =
      cfg.profile == PlatformProfile::coursera_like ? EventType::video_download : EventType::chapter_view;

  std::vector<StudentState> students(n);
  course.truth.students.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    StudentState& s = students[i];
    s.behaviour.seed(mix_seed(cfg.seed, kBehaviourSalt + i * 7));
    s.profile.seed(mix_seed(cfg.seed, kProfileSalt + i * 7));
    s.engagement = std::exp(std::normal_distribution<double>(cfg.engagement_log_mean, cfg.engagement_log_sd)(s.behaviour));
    s.forum = std::bernoulli_distribution(std::min(1.0, cfg.forum_probability * s.engagement))(s.behaviour);
    StudentTruth& t = course.truth.students[i];
    t.student_id = student_name(i);
    t.engagement = s.engagement;
    t.forum_participant = s.forum;
  }

  std::mt19937_64 forum_rng(mix_seed(cfg.seed, kForumSalt));
  std::vector<double> attachment(n, 1.0);  // 1 + posts authored so far
  std::vector<std::set<std::size_t>> partners(n);
  std::vector<int> replies_received(n, 0);
  std::vector<EventRecord> events;
  std::vector<ForumPost> posts;
  std::size_t thread_counter = 0, post_counter = 0;

  auto add_post = [&](const std::string& author, const std::string& thread, Timestamp ts,
                      std::optional<std::string> parent) -> const ForumPost& {
    ForumPost p;
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%07zu", ++post_counter);
    p.post_id = buf;
    p.thread_id = thread;
    p.author_id = author;
    p.timestamp = ts;
    p.parent_post_id = std::move(parent);
    p.upvotes = std::poisson_distribution<std::int64_t>(cfg.upvote_rate)(forum_rng);
    p.downvotes = std::poisson_distribution<std::int64_t>(cfg.downvote_rate)(forum_rng);
    events.push_back({author, p.is_root() ? EventType::post : EventType::comment, ts, thread, p.post_id, std::nullopt});
    posts.push_back(std::move(p));
    return posts.back();
  };

  for (int week = 1; week <= cfg.num_weeks; ++week) {
    const Timestamp lo = cfg.start_time + kSecondsPerWeek * (week - 1);
    const Timestamp hi = lo + kSecondsPerWeek;
    std::vector<int> videos(n, 0), subs(n, 0), week_posts(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
      StudentState& s = students[i];
      if (!s.active) continue;
      const std::string id = student_name(i);
      videos[i] = 1 + std::poisson_distribution<int>(s.engagement * cfg.video_rate)(s.behaviour);
      subs[i] = std::poisson_distribution<int>(s.engagement * cfg.submission_rate)(s.behaviour);
      const int extra = std::poisson_distribution<int>(s.engagement * cfg.profile_rate)(s.profile);
      for (int k = 0; k < videos[i]; ++k) events.push_back({id, EventType::video_view, uniform_time(s.behaviour, lo, hi), {}, {}, {}});
      for (int k = 0; k < subs[i]; ++k) events.push_back({id, EventType::submission, uniform_time(s.behaviour, lo, hi), {}, {}, {}});
      for (int k = 0; k < extra; ++k) events.push_back({id, profile_event, uniform_time(s.profile, lo, hi), {}, {}, {}});
      s.submissions += subs[i];
    }

    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if (students[i].active && students[i].forum) pool.push_back(i);
    }
    if (!pool.empty()) {
      const int threads = std::poisson_distribution<int>(cfg.threads_per_week)(forum_rng);
      for (int th = 0; th < threads; ++th) {
        const std::string thread_id = "t" + std::to_string(++thread_counter);
        const int replies = std::poisson_distribution<int>(cfg.replies_per_thread)(forum_rng);
        std::vector<Timestamp> times(static_cast<std::size_t>(replies) + 1);
        for (auto& t : times) t = uniform_time(forum_rng, lo, hi);
        std::sort(times.begin(), times.end());

        std::vector<std::string> thread_posts;
        std::vector<std::size_t> thread_authors;
        const std::size_t origin = weighted_pick(forum_rng, pool, attachment);
        thread_posts.push_back(add_post(student_name(origin), thread_id, times[0], std::nullopt).post_id);
        thread_authors.push_back(origin);
        attachment[origin] += 1.0;
        ++week_posts[origin];
        for (int r = 1; r <= replies; ++r) {
          const std::size_t author = weighted_pick(forum_rng, pool, attachment);
          const std::size_t parent_index =
              cfg.flat_replies ? 0 : std::uniform_int_distribution<std::size_t>(0, thread_posts.size() - 1)(forum_rng);
          thread_posts.push_back(add_post(student_name(author), thread_id, times[static_cast<std::size_t>(r)],
                                          thread_posts[parent_index])
                                     .post_id);
          thread_authors.push_back(author);
          const std::size_t answered = thread_authors[parent_index];
          if (answered != author) {
            ++replies_received[answered];
            partners[author].insert(answered);
            partners[answered].insert(author);
          }
          attachment[author] += 1.0;
          ++week_posts[author];
        }
        if (cfg.n_staff > 0 && std::bernoulli_distribution(cfg.staff_reply_probability)(forum_rng)) {
          const auto who = std::uniform_int_distribution<std::size_t>(0, cfg.n_staff - 1)(forum_rng);
          add_post(staff_name(who), thread_id, hi - 1, thread_posts.front());
        }
      }
    }

    // Hazard at the end of every week but the last. Rates use the activity
    // state from before this week's departures.
    std::vector<double> rates(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const StudentState& s = students[i];
      if (!s.active) continue;
      std::size_t gone = 0;
      for (std::size_t j : partners[i]) gone += students[j].active ? 0 : 1;
      const double share = partners[i].empty() ? 0.0 : double(gone) / double(partners[i].size());
      const auto& h = cfg.hazard;
      rates[i] = logistic(h.intercept + h.log_engagement * std::log(s.engagement) + h.video * videos[i] +
                          h.submissions * subs[i] + h.posts * week_posts[i] + h.dropped_partners * share +
                          h.replies_received * std::log1p(replies_received[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      StudentState& s = students[i];
      if (!s.active) continue;
      StudentTruth& truth = course.truth.students[i];
      truth.last_active_week = week;
      if (week == cfg.num_weeks) continue;
      truth.weekly_hazard.push_back(rates[i]);
      if (std::bernoulli_distribution(rates[i])(s.behaviour)) {
        s.active = false;
        truth.dropped = true;
      }
    }
  }

  std::vector<StudentOutcome> outcomes;
  for (std::size_t i = 0; i < n; ++i) {
    StudentOutcome o;
    o.student_id = student_name(i);
    const int attempts = students[i].submissions;
    if (attempts > 0) o.final_grade = std::min(1.0, attempts / (2.0 * cfg.certificate_threshold));
    o.certificate = attempts >= cfg.certificate_threshold;
    outcomes.push_back(std::move(o));
  }

  std::sort(events.begin(), events.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.student_id != b.student_id) return a.student_id < b.student_id;
    if (a.event_type != b.event_type) return a.event_type < b.event_type;
    return a.post_id < b.post_id;
  });
  course.data = make_course(std::move(events), std::move(posts), std::move(outcomes));
  return course;
}

std::pair<SynthCourse, SynthCourse> twin_courses(const SynthConfig& config, PlatformProfile profile_a,
                                                 PlatformProfile profile_b, bool same_seed) {
  SynthConfig a = config, b = config;
  a.profile = profile_a;
  b.profile = profile_b;
  a.course_id = config.course_id + "_a";
  b.course_id = config.course_id + "_b";
  if (!same_seed) {
    a.seed = mix_seed(config.seed, 0xA);
    b.seed = mix_seed(config.seed, 0xB);
  }
  return {generate_course(a), generate_course(b)};
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  using nlohmann::json;
  const auto& h = truth.hazard;
  out << json{{"type", "hazard_model"},
              {"intercept", h.intercept},
              {"log_engagement", h.log_engagement},
              {"video", h.video},
              {"submissions", h.submissions},
              {"dropped_partners", h.dropped_partners},
              {"replies_received", h.replies_received},
              {"posts", h.posts}}
             .dump()
      << '\n';
  for (const auto& s : truth.students) {
    out << json{{"type", "student"},
                {"student_id", s.student_id},
                {"engagement", s.engagement},
                {"last_active_week", s.last_active_week},
                {"dropped", s.dropped},
                {"forum_participant", s.forum_participant},
                {"weekly_hazard", s.weekly_hazard}}
               .dump()
        << '\n';
  }
}

void save_synth_course(const std::filesystem::path& dir, const SynthCourse& course) {
  save_course(CoursePaths::in_directory(dir), course.data, course.config);
  std::ostringstream gt;
  write_ground_truth(gt, course.truth);
  csv::write_text(dir / "ground_truth.jsonl", gt.str());
}

}  // namespace attrition
