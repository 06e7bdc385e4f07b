#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipr/ids.hpp"
#include "ipr/time.hpp"

namespace ipr {

enum class Condition { BlindRandom, IdentifiedRandom, IdentifiedIncentive };

enum class Phase { Submission, Reviewing, Rating, Released };

/// Expired marks a task that was still pending when reviewing was closed
/// with force; it never produces a review.
enum class TaskStatus { Pending, Reviewed, Rated, Expired };

inline constexpr std::size_t kPromptCount = 4;
inline constexpr std::size_t kMaxIntroLength = 500;
inline constexpr std::size_t kMaxPromptLength = 4000;
inline constexpr std::size_t kMaxMessageLength = 2000;
inline constexpr int kMinStars = 1;
inline constexpr int kMaxStars = 5;
inline constexpr int kDefaultFanOut = 3;
inline constexpr int kDefaultNudgeThreshold = 15;

/// Canonical names are the upper-case forms ("BLIND_RANDOM"); the parsers
/// also accept the CLI spelling ("blind-random").
std::string_view to_string(Condition c) noexcept;
std::string_view to_cli_string(Condition c) noexcept;
std::string_view to_string(Phase p) noexcept;
std::string_view to_string(TaskStatus s) noexcept;
Condition parse_condition(std::string_view text);
Phase parse_phase(std::string_view text);
TaskStatus parse_task_status(std::string_view text);

constexpr bool is_blind(Condition c) noexcept {
  return c == Condition::BlindRandom;
}

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text) noexcept;

struct GradeScale {
  int min = 0;
  int max = 100;

  bool contains(int grade) const noexcept { return grade >= min && grade <= max; }
  friend bool operator==(const GradeScale&, const GradeScale&) = default;
};

/// Per-course settings. Copied into every round at creation and never
/// changed afterwards.
struct CourseConfig {
  Condition condition = Condition::IdentifiedIncentive;
  int k = kDefaultFanOut;
  GradeScale scale;
  int nudge_threshold = kDefaultNudgeThreshold;
  std::map<Phase, Timestamp> deadlines;
  std::uint64_t seed = 0;

  friend bool operator==(const CourseConfig&, const CourseConfig&) = default;
};

struct UsefulnessEntry {
  RoundId round;
  double mean_rating = 0.0;

  friend bool operator==(const UsefulnessEntry&, const UsefulnessEntry&) = default;
};

struct Participant {
  ParticipantId id;
  std::string display_name;
  std::optional<std::string> intro;
  std::vector<UsefulnessEntry> usefulness_history;

  friend bool operator==(const Participant&, const Participant&) = default;
};

struct CourseRound {
  RoundId id;
  int ordinal = 0;
  Condition condition = Condition::IdentifiedIncentive;
  Phase phase = Phase::Submission;
  int k = kDefaultFanOut;
  GradeScale scale;
  int nudge_threshold = kDefaultNudgeThreshold;
  std::vector<ParticipantId> roster;
  std::map<Phase, Timestamp> deadlines;
  std::uint64_t rng_seed = 0;

  bool in_roster(const ParticipantId& p) const;
  friend bool operator==(const CourseRound&, const CourseRound&) = default;
};

struct Submission {
  ParticipantId author;
  RoundId round;
  std::string content_ref;
  Timestamp submitted_at{};

  friend bool operator==(const Submission&, const Submission&) = default;
};

struct ReviewTask {
  TaskId id;
  ParticipantId reviewer;
  ParticipantId author;
  RoundId round;
  TaskStatus status = TaskStatus::Pending;

  friend bool operator==(const ReviewTask&, const ReviewTask&) = default;
};

using Prompts = std::array<std::string, kPromptCount>;

struct Review {
  ReviewId id;
  TaskId task;
  Prompts prompts;
  int grade = 0;
  Timestamp created_at{};

  friend bool operator==(const Review&, const Review&) = default;
};

struct UsefulnessRating {
  ReviewId review;
  int stars = 0;
  Timestamp rated_at{};

  friend bool operator==(const UsefulnessRating&, const UsefulnessRating&) = default;
};

struct Message {
  ReviewId review;
  ParticipantId sender;
  std::string body;
  Timestamp sent_at{};

  friend bool operator==(const Message&, const Message&) = default;
};

struct GradeReport {
  ParticipantId participant;
  RoundId round;
  std::vector<int> per_review_grades;
  std::optional<int> aggregate;

  friend bool operator==(const GradeReport&, const GradeReport&) = default;
};

}  // namespace ipr
