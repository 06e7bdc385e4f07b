#pragma once

#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ipr/time.hpp"

namespace ipr {

enum class EventKind {
  RoundCreated,
  SubmissionMade,
  IntroRecorded,
  PhaseAdvanced,
  AssignmentCreated,
  ReviewSubmitted,
  FeedbackRated,
  MessagePosted,
  GradesReleased,
};

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

/// One immutable entry of a course's log. Payloads hold only strings,
/// integers, booleans, arrays and objects so that their JSON dump is stable.
struct Event {
  std::uint64_t sequence = 0;
  Timestamp occurred_at{};
  EventKind kind = EventKind::RoundCreated;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

/// {"kind","payload","seq","ts"}; the checksummed body of a log record.
nlohmann::json event_body(const Event& event);
Event event_from_body(const nlohmann::json& body);

}  // namespace ipr
