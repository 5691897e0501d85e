#pragma once

// Synthetic courses with known generative truth: latent engagement drives
// weekly activity, a logistic weekly hazard drives dropout, and forum threads
// grow by preferential attachment among active participants.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "attrition/ingest.hpp"

namespace attrition {

// logit h_t = intercept + log_engagement·log e + video·v_t + submissions·s_t + posts·p_t
//             + dropped_partners·d_t + replies_received·log(1 + r_t)
// where v_t, s_t, p_t are the student's counts in week t, d_t is the share
// of their reply partners so far (students they replied to or who replied to
// them) who have already left the course, and r_t counts the replies other
// students have made to their posts so far.
struct HazardCoefficients {
  double intercept = -1.5;
  double log_engagement = -1.2;
  double video = 0.0;
  double submissions = 0.0;
  double posts = 0.0;
  double dropped_partners = 0.0;
  double replies_received = 0.0;
};

struct SynthConfig {
  std::size_t n_students = 1000;
  int num_weeks = 6;
  PlatformProfile profile = PlatformProfile::coursera_like;
  std::string course_id = "synthetic";
  Timestamp start_time = 1'382'572'800;  // 2013-10-24T00:00:00Z

  // log e ~ Normal(mean, sd)
  double engagement_log_mean = 0.0;
  double engagement_log_sd = 0.8;

  // Weekly Poisson rates per unit engagement. Every active week also has one
  // guaranteed video view, so observed and true last active weeks coincide.
  double video_rate = 2.0;
  double profile_rate = 1.0;  // video_download (coursera_like) or chapter_view (edx_like)
  double submission_rate = 1.0;

  HazardCoefficients hazard;

  // Chance of forum participation is min(1, forum_probability · e).
  double forum_probability = 0.15;
  double threads_per_week = 12.0;
  double replies_per_thread = 3.0;
  // true: every reply's parent is the thread root; false: a uniformly chosen
  // earlier post.
  bool flat_replies = false;
  double upvote_rate = 0.6;
  double downvote_rate = 0.15;

  std::size_t n_staff = 1;
  double staff_reply_probability = 0.3;

  // Certificate when total submissions reach this count.
  int certificate_threshold = 12;

  std::uint64_t seed = 1;
};

// Throws UsageError on out-of-range parameters.
void validate(const SynthConfig& config);

struct StudentTruth {
  std::string student_id;
  double engagement = 0.0;
  int last_active_week = 0;  // true last week of activity
  bool dropped = false;      // left before the final week
  bool forum_participant = false;
  std::vector<double> weekly_hazard;  // hazard applied at the end of each active week < W
};

struct GroundTruth {
  HazardCoefficients hazard;
  std::vector<StudentTruth> students;
};

struct SynthCourse {
  CourseConfig config;
  CourseData data;
  GroundTruth truth;
};

SynthCourse generate_course(const SynthConfig& config);

// Two courses from the same behavioural parameters on different platform
// profiles. Sub-seeds are independent unless `same_seed` forces both to use
// config.seed, in which case the shared event streams coincide.
std::pair<SynthCourse, SynthCourse> twin_courses(const SynthConfig& config, PlatformProfile profile_a,
                                                 PlatformProfile profile_b, bool same_seed = false);

// JSON Lines: one "hazard_model" line, then one line per student.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

// Writes events.jsonl, forum.jsonl, outcomes.csv, course.cfg and
// ground_truth.jsonl into `dir`.
void save_synth_course(const std::filesystem::path& dir, const SynthCourse& course);

}  // namespace attrition
