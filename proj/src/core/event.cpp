#include "ipr/event.hpp"

#include "ipr/error.hpp"

namespace ipr {

namespace {
constexpr EventKind kAllKinds[] = {
    EventKind::RoundCreated,   EventKind::SubmissionMade,    EventKind::IntroRecorded,
    EventKind::PhaseAdvanced,  EventKind::AssignmentCreated, EventKind::ReviewSubmitted,
    EventKind::FeedbackRated,  EventKind::MessagePosted,     EventKind::GradesReleased,
};
}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::RoundCreated: return "RoundCreated";
    case EventKind::SubmissionMade: return "SubmissionMade";
    case EventKind::IntroRecorded: return "IntroRecorded";
    case EventKind::PhaseAdvanced: return "PhaseAdvanced";
    case EventKind::AssignmentCreated: return "AssignmentCreated";
    case EventKind::ReviewSubmitted: return "ReviewSubmitted";
    case EventKind::FeedbackRated: return "FeedbackRated";
    case EventKind::MessagePosted: return "MessagePosted";
    case EventKind::GradesReleased: return "GradesReleased";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view text) {
  for (auto kind : kAllKinds) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown event kind: " + std::string(text));
}

nlohmann::json event_body(const Event& event) {
  return {{"seq", event.sequence},
          {"ts", format_rfc3339(event.occurred_at)},
          {"kind", to_string(event.kind)},
          {"payload", event.payload}};
}

Event event_from_body(const nlohmann::json& body) {
  Event e;
  e.sequence = body.at("seq").get<std::uint64_t>();
  e.occurred_at = parse_rfc3339(body.at("ts").get<std::string>());
  e.kind = parse_event_kind(body.at("kind").get<std::string>());
  e.payload = body.at("payload");
  return e;
}

}  // namespace ipr
