#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <unistd.h>

#include "attrition/ingest.hpp"

namespace fixtures {

using namespace attrition;

inline constexpr Timestamp kStart = 1'382'572'800;  // 2013-10-24

inline CourseConfig config(int weeks = 6, std::set<std::string> staff = {}) {
  CourseConfig c;
  c.course_id = "test";
  c.start_time = kStart;
  c.num_weeks = weeks;
  c.staff_ids = std::move(staff);
  return c;
}

// Timestamp `hours` into week `week` (1-based).
inline Timestamp at(int week, int hours = 1) { return kStart + kSecondsPerWeek * (week - 1) + 3600 * hours; }

inline EventRecord event(const std::string& who, EventType type, Timestamp t) { return {who, type, t, {}, {}, {}}; }

inline ForumPost post(const std::string& id, const std::string& thread, const std::string& author, Timestamp t,
                      std::optional<std::string> parent = std::nullopt, std::int64_t up = 0, std::int64_t down = 0) {
  return {id, thread, author, t, std::move(parent), up, down};
}

// Matching post/comment event for a forum post.
inline EventRecord post_event(const ForumPost& p) {
  return {p.author_id, p.is_root() ? EventType::post : EventType::comment, p.timestamp, p.thread_id, p.post_id, {}};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("attrition_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
