#pragma once

#include <string>
#include <vector>

#include "ipr/course.hpp"

namespace ipr::testing {

inline Timestamp at(int seconds) {
  return Timestamp{std::chrono::milliseconds{1'700'000'000'000LL + seconds * 1000LL}};
}

inline std::vector<RosterEntry> roster(const std::string& course, int n) {
  std::vector<RosterEntry> out;
  for (int i = 1; i <= n; ++i) {
    out.push_back({ParticipantId{course + "-p" + std::to_string(i)},
                   "Student Number " + std::to_string(i)});
  }
  return out;
}

inline ParticipantId pid(const std::string& course, int i) {
  return ParticipantId{course + "-p" + std::to_string(i)};
}

inline Prompts full_prompts() {
  return {"The argument in section two is clear and well supported by the survey data.",
          "Consider adding a diagram of the workflow so readers can follow each step.",
          "The conclusion repeats the introduction; summarise what you learned instead.",
          "Overall a solid draft that would improve with one more concrete example."};
}

/// A round with `n` participants, all submitted, advanced to REVIEWING.
struct RoundFixture {
  Course course{"c1"};
  RoundId round;
  int n;
  int clock = 0;

  explicit RoundFixture(int participants,
                        Condition condition = Condition::IdentifiedIncentive, int k = 3,
                        std::uint64_t seed = 7)
      : n(participants) {
    CourseConfig config;
    config.condition = condition;
    config.k = k;
    config.seed = seed;
    const auto r = roster("c1", n);
    round = course.create_round(config, r, tick());
    for (const auto& e : r) course.submit_assignment(round, e.id, "https://example.org/" + e.id.value, tick());
  }

  Timestamp tick() { return at(++clock); }

  void to_reviewing() { course.advance_phase(round, Phase::Reviewing, tick()); }

  void review_all(int grade = 80) {
    for (const auto& t : course.tasks_in_round(round)) {
      if (t.status == TaskStatus::Pending) {
        course.submit_review(t.id, t.reviewer, full_prompts(), grade, tick());
      }
    }
  }

  void to_rating(bool force = false) { course.advance_phase(round, Phase::Rating, tick(), force); }
};

}  // namespace ipr::testing
