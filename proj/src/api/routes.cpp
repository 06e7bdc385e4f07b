#include "ipr/api/routes.hpp"

#include <array>
#include <sstream>
#include <vector>

namespace ipr::api {

namespace {

using enum Endpoint;

constexpr std::array kRoutes{
    Route{Health, "GET", "/health", Access::Public, "Liveness probe.", "", "{status}"},
    Route{CreateCourse, "POST", "/courses", Access::Admin,
          "Create a course and its roster; issues one token per participant.",
          "{participants:[{display_name}], condition?, k?, grade_min?, grade_max?, "
          "nudge_threshold?, seed?, deadlines?}",
          "{course_id, participants:[{participant_id, token, expires_at}]}"},
    Route{CreateRound, "POST", "/courses/{c}/rounds", Access::Admin,
          "Open a new round over the course roster. Body fields override the course config.",
          "{condition?, k?, grade_min?, grade_max?, nudge_threshold?, seed?, deadlines?}",
          "round view"},
    Route{IssueTokens, "POST", "/courses/{c}/tokens", Access::Admin,
          "Issue fresh tokens for every participant, or for one.", "{participant_id?}",
          "{course_id, participants:[{participant_id, token, expires_at}]}"},
    Route{TakeSnapshot, "POST", "/courses/{c}/snapshot", Access::Admin,
          "Write a state snapshot next to the course log.", "", "{course_id, covering_seq}"},
    Route{CourseState, "GET", "/courses/{c}/state", Access::Admin,
          "Full folded course state, for operators and replay checks.", "",
          "{course_id, last_sequence, state}"},
    Route{AdvancePhase, "POST", "/rounds/{r}/phase", Access::Admin,
          "Move the round to the next phase. Entering REVIEWING runs the matcher.",
          "{target: REVIEWING|RATING|RELEASED, force?}", "round view"},
    Route{GetRound, "GET", "/rounds/{r}", Access::Participant,
          "Round configuration and phase, plus the caller's own submission.", "",
          "{round_id, ordinal, condition, phase, k, grade_min, grade_max, deadlines, "
          "roster_size, submission?}"},
    Route{SubmitAssignment, "POST", "/rounds/{r}/submissions", Access::Participant,
          "Submit or replace the caller's assignment while the round is in SUBMISSION.",
          "{content_ref}", "{round_id, author, content_ref, submitted_at}"},
    Route{PutIntro, "PUT", "/participants/{p}/intro", Access::Participant,
          "Record the caller's introduction (identified rounds only).", "{round_id, intro}",
          "{participant_id, intro}"},
    Route{ListTasks, "GET", "/rounds/{r}/tasks", Access::Participant,
          "Pending review tasks of the caller. Author identity appears only in identified "
          "rounds.",
          "?reviewer={p}",
          "{round_id, tasks:[{task_id, status, submission:{content_ref}, author?}]}"},
    Route{SubmitReview, "POST", "/tasks/{t}/review", Access::Participant,
          "Submit the four feedback fields and a grade.", "{prompts:[4 strings], grade}",
          "{review_id, task_id, nudges:[{prompt, message}]}"},
    Route{GetFeedback, "GET", "/rounds/{r}/feedback", Access::Participant,
          "Reviews the caller received. Grades are omitted until all of them are rated; "
          "reviewers are anonymous in blind rounds.",
          "?participant={p}",
          "{round_id, phase, grades_visible, reviews:[{review_id, prompts, created_at, stars?, "
          "grade?, reviewer?|reviewer_label}]}"},
    Route{RateReview, "POST", "/reviews/{v}/rating", Access::Participant,
          "Rate a received review from 1 to 5 stars.", "{stars}",
          "{review_id, stars, rated_at, grades_visible}"},
    Route{PostMessage, "POST", "/reviews/{v}/messages", Access::Participant,
          "Post to the conversation attached to a review.", "{body}", "message view"},
    Route{ListMessages, "GET", "/reviews/{v}/messages", Access::Participant,
          "Conversation attached to a review; parties only.", "",
          "{review_id, messages:[{sender_role, sender?, body, sent_at}]}"},
    Route{GetGrades, "GET", "/rounds/{r}/grades", Access::Participant,
          "Grade report, or 409 {\"error\":\"GradesPending\"} until all received feedback is "
          "rated.",
          "?participant={p}", "{participant_id, round_id, per_review_grades, aggregate?}"},
};

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    out.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return out;
}

bool match_pattern(std::string_view pattern, const std::vector<std::string_view>& segments,
                   std::map<std::string, std::string>& params) {
  const auto want = split_path(pattern);
  if (want.size() != segments.size()) return false;
  std::map<std::string, std::string> captured;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i].size() > 2 && want[i].front() == '{') {
      if (segments[i].empty()) return false;
      captured.emplace(std::string(want[i].substr(1, want[i].size() - 2)), std::string(segments[i]));
    } else if (want[i] != segments[i]) {
      return false;
    }
  }
  params = std::move(captured);
  return true;
}

std::string_view access_label(Access a) {
  switch (a) {
    case Access::Public: return "none";
    case Access::Admin: return "admin token";
    case Access::Participant: return "participant token";
  }
  return "";
}

}  // namespace

std::span<const Route> route_table() { return kRoutes; }

std::optional<RouteMatch> match_route(std::string_view method, std::string_view path,
                                      MatchFailure* failure) {
  const auto segments = split_path(path);
  bool path_known = false;
  for (const auto& route : kRoutes) {
    std::map<std::string, std::string> params;
    if (!match_pattern(route.pattern, segments, params)) continue;
    path_known = true;
    if (route.method == method) return RouteMatch{&route, std::move(params)};
  }
  if (failure) *failure = path_known ? MatchFailure::MethodNotAllowed : MatchFailure::NoSuchPath;
  return std::nullopt;
}

std::string routes_markdown() {
  std::ostringstream out;
  out << "# HTTP API\n\n"
      << "JSON over HTTP/1.1. Field names are snake_case and timestamps are RFC 3339 UTC.\n"
      << "Authenticate with `Authorization: Bearer <token>`.\n\n"
      << "Errors are `{\"error\": \"<Code>\", \"message\": \"...\"}` with status 400 (malformed "
         "JSON), 401 (missing, unknown, expired or foreign-course token), 403 (not your "
         "resource), 404, 405, 409 (phase or gating conflict), 422 (validation) or 503 "
         "(storage).\n\n"
      << "| Method | Path | Auth | Description |\n|---|---|---|---|\n";
  for (const auto& r : kRoutes) {
    out << "| " << r.method << " | `" << r.pattern << "` | " << access_label(r.access) << " | "
        << r.summary << " |\n";
  }
  out << "\n## Endpoints\n";
  for (const auto& r : kRoutes) {
    out << "\n### " << r.method << " " << r.pattern << "\n\n" << r.summary << "\n\n";
    if (!r.request.empty()) out << "- Request: `" << r.request << "`\n";
    out << "- Response: `" << r.response << "`\n";
  }
  return out.str();
}

}  // namespace ipr::api
