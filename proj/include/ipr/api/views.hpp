#pragma once

#include <nlohmann/json.hpp>

#include "ipr/course.hpp"

namespace ipr::api {

// JSON projections of course state for one viewer. These are the only place
// response bodies are built from domain objects, so blindness and grade
// gating are enforced here: display names and intros appear only in
// identified rounds, and a grade appears only once grades_visible holds.

inline constexpr std::string_view kAnonymousReviewer = "Anonymous reviewer";

nlohmann::json round_view(const Course& course, const RoundId& round,
                          const ParticipantId* viewer);
nlohmann::json submission_view(const Submission& s);
nlohmann::json task_list_view(const Course& course, const RoundId& round,
                              const ParticipantId& reviewer);
nlohmann::json review_receipt(const Course& course, const Review& review);
nlohmann::json feedback_view(const Course& course, const RoundId& round,
                             const ParticipantId& participant);
nlohmann::json rating_view(const Course& course, const UsefulnessRating& rating);
nlohmann::json message_view(const Course& course, const Message& message);
nlohmann::json thread_view(const Course& course, const ReviewId& review);
nlohmann::json grade_view(const GradeReport& report);

}  // namespace ipr::api
