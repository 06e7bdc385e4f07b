#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipr/error.hpp"
#include "ipr/event.hpp"
#include "ipr/matching.hpp"
#include "ipr/types.hpp"

namespace ipr {

struct RosterEntry {
  ParticipantId id;
  std::string display_name;
};

/// Everything a course log folds into. Plain value type: copies are
/// independent snapshots and compare by deep equality.
struct CourseState {
  std::map<ParticipantId, Participant> participants;
  std::map<RoundId, CourseRound> rounds;
  std::map<std::pair<RoundId, ParticipantId>, Submission> submissions;
  std::map<TaskId, ReviewTask> tasks;
  std::map<ReviewId, Review> reviews;
  std::map<ReviewId, UsefulnessRating> ratings;
  std::map<ReviewId, std::vector<Message>> threads;
  std::set<std::pair<RoundId, ParticipantId>> released;
  std::uint64_t last_sequence = 0;

  friend bool operator==(const CourseState&, const CourseState&) = default;
};

/// Called with each new event before it is applied. Throwing aborts the
/// command and leaves the state untouched by that event.
using EventSink = std::function<void(const Event&)>;

/// The event-sourced aggregate for one course. Commands validate, emit one
/// or more events through the sink, then fold them into the state; replay
/// feeds stored events straight into apply().
///
/// Not internally synchronized: callers serialize mutations per course.
class Course {
 public:
  explicit Course(std::string id);
  Course(std::string id, CourseState state);

  const std::string& id() const noexcept { return id_; }
  const CourseState& state() const noexcept { return state_; }
  void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

  // ---- commands -----------------------------------------------------------

  /// Registers unseen roster entries as participants and opens a round in
  /// the SUBMISSION phase. The round seed is derived from config.seed and
  /// the round ordinal.
  RoundId create_round(const CourseConfig& config,
                       std::span<const RosterEntry> roster, Timestamp now);

  Submission submit_assignment(const RoundId& round,
                               const ParticipantId& participant,
                               std::string content_ref, Timestamp now);

  Participant record_intro(const RoundId& round,
                           const ParticipantId& participant, std::string text,
                           Timestamp now);

  /// Moves the round one phase forward. Entering REVIEWING runs the matcher
  /// once and creates the tasks. Leaving REVIEWING with pending tasks needs
  /// `force`; those tasks expire. Entering RELEASED appends each reviewer's
  /// mean received rating for the round to their usefulness history.
  CourseRound advance_phase(const RoundId& round, Phase target, Timestamp now,
                            bool force = false);

  Review submit_review(const TaskId& task, const ParticipantId& caller,
                       Prompts prompts, int grade, Timestamp now);

  UsefulnessRating rate_feedback(const ReviewId& review,
                                 const ParticipantId& caller, int stars,
                                 Timestamp now);

  Message post_message(const ReviewId& review, const ParticipantId& sender,
                       std::string body, Timestamp now);

  /// Folds an event into the state without re-validating it. Throws
  /// Error(SequenceConflict) unless event.sequence == last_sequence + 1.
  void apply(const Event& event);

  // ---- queries ------------------------------------------------------------

  const CourseRound& round(const RoundId& id) const;
  const Participant& participant(const ParticipantId& id) const;
  const ReviewTask& task(const TaskId& id) const;
  const Review& review(const ReviewId& id) const;
  const ReviewTask& task_of(const ReviewId& review) const;
  const Submission* submission(const RoundId& round,
                               const ParticipantId& author) const;
  std::optional<UsefulnessRating> rating(const ReviewId& review) const;
  const std::vector<Message>& thread(const ReviewId& review) const;

  std::vector<ReviewTask> tasks_for_reviewer(const RoundId& round,
                                             const ParticipantId& reviewer) const;
  std::vector<ReviewTask> tasks_in_round(const RoundId& round) const;
  /// Reviews authored about `author` in `round`, ordered by review id.
  std::vector<Review> reviews_received(const RoundId& round,
                                       const ParticipantId& author) const;
  std::vector<ParticipantId> submitters(const RoundId& round) const;

  /// True iff phase >= RATING and every review `participant` received in
  /// the round carries their rating. Vacuously true with zero reviews.
  bool grades_visible(const RoundId& round, const ParticipantId& participant) const;

  /// Per-review grades and their lower median. Throws Error(GradesPending)
  /// while grades_visible is false.
  GradeReport grade_report(const RoundId& round, const ParticipantId& participant) const;

  /// Stars received on reviews the participant wrote in rounds whose ordinal
  /// is below `before`'s.
  std::vector<int> prior_stars(const ParticipantId& participant,
                               const RoundId& before) const;
  ScoreMap usefulness_scores(const RoundId& round) const;

  /// Reconstructs the round's assignment from its tasks (empty before
  /// REVIEWING).
  AssignmentSet assignment(const RoundId& round) const;

 private:
  void emit(EventKind kind, nlohmann::json payload, Timestamp now);
  CourseRound& mutable_round(const RoundId& id);

  void apply_round_created(const nlohmann::json& p);
  void apply_intro(const nlohmann::json& p);
  void apply_phase(const nlohmann::json& p);
  void apply_assignment(const nlohmann::json& p);
  void apply_release(const nlohmann::json& p);

  std::string id_;
  CourseState state_;
  EventSink sink_;
};

/// Lower median (element (n-1)/2 of the sorted values). Empty input gives
/// nullopt.
std::optional<int> lower_median(std::vector<int> values);

MatchingPolicy policy_for(Condition condition) noexcept;

/// Course id prefix of a participant/round/task/review id ("c1-r2" -> "c1").
std::string course_of(std::string_view id);

}  // namespace ipr
