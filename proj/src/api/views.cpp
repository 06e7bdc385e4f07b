#include "ipr/api/views.hpp"

#include "ipr/nudge.hpp"
#include "ipr/serialize.hpp"

namespace ipr::api {

using nlohmann::json;

namespace {

json person(const Participant& p) {
  json j{{"participant_id", p.id}, {"display_name", p.display_name}};
  if (p.intro) j["intro"] = *p.intro;
  return j;
}

}  // namespace

json round_view(const Course& course, const RoundId& round_id, const ParticipantId* viewer) {
  const auto& r = course.round(round_id);
  json j{{"round_id", r.id},
         {"ordinal", r.ordinal},
         {"condition", r.condition},
         {"phase", r.phase},
         {"k", r.k},
         {"grade_min", r.scale.min},
         {"grade_max", r.scale.max},
         {"nudge_threshold", r.nudge_threshold},
         {"deadlines", deadlines_to_json(r.deadlines)},
         {"roster_size", r.roster.size()}};
  if (viewer) {
    if (const auto* s = course.submission(round_id, *viewer)) j["submission"] = submission_view(*s);
  }
  return j;
}

json submission_view(const Submission& s) {
  return {{"round_id", s.round},
          {"author", s.author},
          {"content_ref", s.content_ref},
          {"submitted_at", format_rfc3339(s.submitted_at)}};
}

json task_list_view(const Course& course, const RoundId& round_id, const ParticipantId& reviewer) {
  const auto& r = course.round(round_id);
  json tasks = json::array();
  for (const auto& t : course.tasks_for_reviewer(round_id, reviewer)) {
    if (t.status != TaskStatus::Pending) continue;
    json item{{"task_id", t.id}, {"status", t.status}};
    if (const auto* s = course.submission(round_id, t.author)) {
      item["submission"] = {{"content_ref", s->content_ref}};
    }
    if (!is_blind(r.condition)) item["author"] = person(course.participant(t.author));
    tasks.push_back(std::move(item));
  }
  return {{"round_id", round_id}, {"phase", r.phase}, {"tasks", std::move(tasks)}};
}

json review_receipt(const Course& course, const Review& review) {
  const auto& t = course.task(review.task);
  const int threshold = course.round(t.round).nudge_threshold;
  json nudges = json::array();
  for (std::size_t i = 0; i < review.prompts.size(); ++i) {
    if (review.prompts[i].empty()) continue;
    if (auto msg = actionability_nudge(review.prompts[i], threshold)) {
      nudges.push_back({{"prompt", i}, {"message", *msg}});
    }
  }
  return {{"review_id", review.id},
          {"task_id", review.task},
          {"created_at", format_rfc3339(review.created_at)},
          {"nudges", std::move(nudges)}};
}

json feedback_view(const Course& course, const RoundId& round_id, const ParticipantId& participant) {
  const auto& r = course.round(round_id);
  const bool visible = course.grades_visible(round_id, participant);
  json reviews = json::array();
  if (r.phase >= Phase::Rating) {
    for (const auto& review : course.reviews_received(round_id, participant)) {
      json item{{"review_id", review.id},
                {"prompts", review.prompts},
                {"created_at", format_rfc3339(review.created_at)}};
      if (auto rating = course.rating(review.id)) item["stars"] = rating->stars;
      if (visible) item["grade"] = review.grade;
      if (is_blind(r.condition)) {
        item["reviewer_label"] = kAnonymousReviewer;
      } else {
        item["reviewer"] = person(course.participant(course.task(review.task).reviewer));
      }
      reviews.push_back(std::move(item));
    }
  }
  return {{"round_id", round_id},
          {"phase", r.phase},
          {"grades_visible", visible},
          {"reviews", std::move(reviews)}};
}

json rating_view(const Course& course, const UsefulnessRating& rating) {
  const auto& t = course.task_of(rating.review);
  return {{"review_id", rating.review},
          {"stars", rating.stars},
          {"rated_at", format_rfc3339(rating.rated_at)},
          {"grades_visible", course.grades_visible(t.round, t.author)}};
}

json message_view(const Course& course, const Message& message) {
  const auto& t = course.task_of(message.review);
  json j{{"review_id", message.review},
         {"sender_role", message.sender == t.reviewer ? "reviewer" : "author"},
         {"body", message.body},
         {"sent_at", format_rfc3339(message.sent_at)}};
  if (!is_blind(course.round(t.round).condition)) {
    const auto& p = course.participant(message.sender);
    j["sender"] = {{"participant_id", p.id}, {"display_name", p.display_name}};
  }
  return j;
}

json thread_view(const Course& course, const ReviewId& review) {
  json messages = json::array();
  for (const auto& m : course.thread(review)) messages.push_back(message_view(course, m));
  return {{"review_id", review}, {"messages", std::move(messages)}};
}

json grade_view(const GradeReport& report) {
  json j{{"participant_id", report.participant},
         {"round_id", report.round},
         {"per_review_grades", report.per_review_grades}};
  if (report.aggregate) j["aggregate"] = *report.aggregate;
  return j;
}

}  // namespace ipr::api
