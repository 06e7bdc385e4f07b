#include "ipr/types.hpp"

#include <algorithm>

#include "ipr/error.hpp"

namespace ipr {

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::BlindRandom: return "BLIND_RANDOM";
    case Condition::IdentifiedRandom: return "IDENTIFIED_RANDOM";
    case Condition::IdentifiedIncentive: return "IDENTIFIED_INCENTIVE";
  }
  return "?";
}

std::string_view to_cli_string(Condition c) noexcept {
  switch (c) {
    case Condition::BlindRandom: return "blind-random";
    case Condition::IdentifiedRandom: return "identified-random";
    case Condition::IdentifiedIncentive: return "identified-incentive";
  }
  return "?";
}

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Submission: return "SUBMISSION";
    case Phase::Reviewing: return "REVIEWING";
    case Phase::Rating: return "RATING";
    case Phase::Released: return "RELEASED";
  }
  return "?";
}

std::string_view to_string(TaskStatus s) noexcept {
  switch (s) {
    case TaskStatus::Pending: return "PENDING";
    case TaskStatus::Reviewed: return "REVIEWED";
    case TaskStatus::Rated: return "RATED";
    case TaskStatus::Expired: return "EXPIRED";
  }
  return "?";
}

Condition parse_condition(std::string_view text) {
  for (auto c : {Condition::BlindRandom, Condition::IdentifiedRandom,
                 Condition::IdentifiedIncentive}) {
    if (text == to_string(c) || text == to_cli_string(c)) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown condition: " + std::string(text));
}

Phase parse_phase(std::string_view text) {
  for (auto p : {Phase::Submission, Phase::Reviewing, Phase::Rating, Phase::Released}) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown phase: " + std::string(text));
}

TaskStatus parse_task_status(std::string_view text) {
  for (auto s : {TaskStatus::Pending, TaskStatus::Reviewed, TaskStatus::Rated,
                 TaskStatus::Expired}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown task status: " + std::string(text));
}

std::size_t utf8_length(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool CourseRound::in_roster(const ParticipantId& p) const {
  return std::find(roster.begin(), roster.end(), p) != roster.end();
}

}  // namespace ipr
