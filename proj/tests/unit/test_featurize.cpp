#include <gtest/gtest.h>

#include <random>

#include "attrition/error.hpp"
#include "attrition/featurize.hpp"
#include "attrition/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace attrition;
using namespace fixtures;

namespace {

CourseData weeks_course(const std::map<std::string, std::vector<int>>& active_weeks) {
  std::vector<EventRecord> events;
  for (const auto& [id, weeks] : active_weeks) {
    for (int w : weeks) events.push_back(event(id, EventType::video_view, at(w)));
  }
  return make_course(events, {}, {});
}

}  // namespace

TEST(Featurize, CumulativeCounts) {
  const CourseData d = make_course({event("a", EventType::video_view, at(1)), event("a", EventType::video_view, at(1, 2)),
                                    event("a", EventType::video_view, at(1, 3)),
                                    event("a", EventType::submission, at(3))},
                                   {}, {});
  const auto w2 = behavioral_forum_features(d, 2, config());
  EXPECT_EQ(w2.at("a").video_view, 3);
  EXPECT_EQ(w2.at("a").total_attempts, 0);
  EXPECT_EQ(behavioral_forum_features(d, 3, config()).at("a").total_attempts, 1);
}

TEST(Featurize, VotesReceived) {
  std::vector<ForumPost> posts{post("p1", "t", "a", at(1), std::nullopt, 2, 3)};
  const CourseData d = make_course({post_event(posts[0])}, posts, {});
  const auto f = behavioral_forum_features(d, 1, config());
  EXPECT_EQ(f.at("a").votes, -1);
  EXPECT_EQ(f.at("a").total_posts, 1);
}

TEST(Featurize, VoteEventsCountFromTheirOwnWeek) {
  std::vector<ForumPost> posts{post("p1", "t", "a", at(1))};
  std::vector<EventRecord> events{post_event(posts[0]), {"b", EventType::vote_cast, at(3), "t", "p1", -1}};
  const CourseData d = make_course(events, posts, {});
  EXPECT_EQ(behavioral_forum_features(d, 2, config()).at("a").votes, 0);
  EXPECT_EQ(behavioral_forum_features(d, 3, config()).at("a").votes, -1);
}

TEST(Featurize, RandomLogMatchesRecount) {
  SynthConfig cfg;
  cfg.n_students = 200;
  cfg.seed = 4;
  cfg.forum_probability = 0.5;
  const SynthCourse s = generate_course(cfg);
  for (int week = 1; week <= cfg.num_weeks; ++week) {
    const Timestamp end = s.config.start_time + kSecondsPerWeek * week;
    std::map<std::string, ActivityCounts> expected;
    for (const auto& e : s.data.events) {
      if (e.timestamp >= end) continue;
      auto& c = expected[e.student_id];
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
    for (const auto& t : s.data.threads) {
      for (const auto& p : t.posts) {
        if (p.timestamp < end) expected[p.author_id].votes += p.upvotes - p.downvotes;
      }
    }
    EXPECT_EQ(behavioral_forum_features(s.data, week, s.config), expected) << "week " << week;
  }
}

TEST(Featurize, LastActiveWeek) {
  const auto L = last_active_week(weeks_course({{"a", {1, 2, 4}}, {"b", {1}}}), config());
  EXPECT_EQ(L.at("a"), 4);
  EXPECT_EQ(L.at("b"), 1);
  EXPECT_FALSE(L.count("c"));
}

TEST(Featurize, LabelDefinitions) {
  const CourseData d = weeks_course({{"l3", {1, 2, 3}}, {"l5", {1, 5}}, {"gap", {1, 2, 4}}});
  const CourseConfig c = config();
  EXPECT_TRUE(compute_labels(d, c, 3).at("l3").semester_dropout);
  EXPECT_TRUE(compute_labels(d, c, 3).at("l3").week_dropout);
  EXPECT_FALSE(compute_labels(d, c, 2).at("l3").week_dropout);
  EXPECT_FALSE(compute_labels(d, c, 1).at("l5").semester_dropout);  // last-week exemption
  EXPECT_TRUE(compute_labels(d, c, 2).at("gap").inactive_next_week);
  EXPECT_FALSE(compute_labels(d, c, 1).at("gap").inactive_next_week);
  EXPECT_FALSE(compute_labels(d, c, 6).at("l5").inactive_next_week);
  EXPECT_THROW(compute_labels(d, c, 7), UsageError);
}

TEST(Featurize, LabelInvariantsOnSyntheticCourses) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.n_students = 300;
    cfg.seed = seed;
    const SynthCourse s = generate_course(cfg);
    std::map<std::string, LabelSet> previous;
    for (int w = 1; w <= cfg.num_weeks; ++w) {
      const auto labels = compute_labels(s.data, s.config, w);
      ASSERT_EQ(labels, oracle::labels_by_scan(s.data, s.config, w));
      for (const auto& [id, l] : labels) {
        if (w < cfg.num_weeks && l.week_dropout) {
          EXPECT_TRUE(l.inactive_next_week) << id;
        }
        if (w > 1) {
          if (previous.at(id).week_dropout) {
            EXPECT_TRUE(l.week_dropout);
          }
          EXPECT_EQ(previous.at(id).semester_dropout, l.semester_dropout);
        }
      }
      previous = labels;
    }
  }
}

TEST(Featurize, NonForumStudentHasZeroSocialFeatures) {
  std::vector<ForumPost> posts{post("p1", "t", "a", at(1)), post("p2", "t", "b", at(1, 2), "p1")};
  std::vector<EventRecord> events{post_event(posts[0]), post_event(posts[1]), event("c", EventType::video_view, at(1))};
  const CourseData d = make_course(events, posts, {});
  const WeeklyFeatureTable t = assemble_weekly(d, config(), 1, GraphKind::type1);
  const std::size_t row = std::find(t.students.begin(), t.students.end(), "c") - t.students.begin();
  ASSERT_LT(row, t.size());
  EXPECT_FALSE(t.in_graph[row]);
  for (const auto& f : social_feature_names()) EXPECT_EQ(t.rows[row][t.feature_index(f)], 0.0);
  EXPECT_EQ(t.rows[row][t.feature_index("video_view")], 1.0);
}

TEST(Featurize, ProfileGatesColumns) {
  const CourseData d = weeks_course({{"a", {1}}});
  CourseConfig c = config();
  EXPECT_FALSE(assemble_weekly(d, c, 1, GraphKind::type1).has_feature("chapter_view"));
  EXPECT_TRUE(assemble_weekly(d, c, 1, GraphKind::type1).has_feature("video_download"));
  c.platform_profile = PlatformProfile::edx_like;
  EXPECT_FALSE(assemble_weekly(d, c, 1, GraphKind::type1).has_feature("video_download"));
  EXPECT_THROW(assemble_weekly(d, c, 1, GraphKind::type1).feature_index("video_download"), SchemaError);
}

TEST(Featurize, TableRowsAreStudentsActiveByWeekEnd) {
  SynthConfig cfg;
  cfg.n_students = 150;
  cfg.seed = 8;
  const SynthCourse s = generate_course(cfg);
  for (int w = 1; w <= cfg.num_weeks; ++w) {
    const WeeklyFeatureTable t = assemble_weekly(s.data, s.config, w, GraphKind::type2);
    std::set<std::string> expected;
    for (const auto& e : s.data.events) {
      if (e.timestamp < s.config.start_time + kSecondsPerWeek * w && !s.config.is_staff(e.student_id)) {
        expected.insert(e.student_id);
      }
    }
    EXPECT_EQ(std::set<std::string>(t.students.begin(), t.students.end()), expected);
    // Counts are cumulative.
    if (w > 1) {
      const WeeklyFeatureTable prev = assemble_weekly(s.data, s.config, w - 1, GraphKind::type2);
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const std::size_t j = std::find(t.students.begin(), t.students.end(), prev.students[i]) - t.students.begin();
        for (const char* f : {"video_view", "video_download", "total_attempts", "total_posts", "total_comments"}) {
          EXPECT_GE(t.rows[j][t.feature_index(f)], prev.rows[i][prev.feature_index(f)]);
        }
      }
    }
  }
}

TEST(Featurize, TableCsvHeader) {
  const WeeklyFeatureTable t = assemble_weekly(weeks_course({{"a", {1}}}), config(), 1, GraphKind::type1);
  const std::string csv = table_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "student_id,video_view,video_download,total_attempts,total_posts,total_comments,votes,betweenness,hub,"
            "authority,in_degree,out_degree,dropped_out_neighbors,semester_dropout,week_dropout,inactive_next_week,"
            "certificate");
  EXPECT_NE(csv.find("a,1.000000,0.000000"), std::string::npos);
}
