#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ipr::api {

enum class Endpoint {
  Health,
  CreateCourse,
  CreateRound,
  IssueTokens,
  TakeSnapshot,
  CourseState,
  AdvancePhase,
  GetRound,
  SubmitAssignment,
  PutIntro,
  ListTasks,
  SubmitReview,
  GetFeedback,
  RateReview,
  PostMessage,
  ListMessages,
  GetGrades,
};

enum class Access { Public, Admin, Participant };

struct Route {
  Endpoint endpoint;
  std::string_view method;
  std::string_view pattern;  // "{name}" segments capture one path segment
  Access access;
  std::string_view summary;
  std::string_view request;   // body or query fields, informal
  std::string_view response;  // informal
};

std::span<const Route> route_table();

struct RouteMatch {
  const Route* route = nullptr;
  std::map<std::string, std::string> params;
};

enum class MatchFailure { NoSuchPath, MethodNotAllowed };

/// Matches against route_table(). On failure reports whether the path
/// exists under another method.
std::optional<RouteMatch> match_route(std::string_view method, std::string_view path,
                                      MatchFailure* failure = nullptr);

/// Markdown endpoint reference built from route_table().
std::string routes_markdown();

}  // namespace ipr::api
