#include "ipr/serialize.hpp"

namespace ipr {

using nlohmann::json;

namespace {

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return std::nullopt;
}

Timestamp ts_field(const json& j, const char* key) {
  return parse_rfc3339(j.at(key).get<std::string>());
}

}  // namespace

void to_json(json& j, const Condition& c) { j = to_string(c); }
void from_json(const json& j, Condition& c) { c = parse_condition(j.get<std::string>()); }
void to_json(json& j, const Phase& p) { j = to_string(p); }
void from_json(const json& j, Phase& p) { p = parse_phase(j.get<std::string>()); }
void to_json(json& j, const TaskStatus& s) { j = to_string(s); }
void from_json(const json& j, TaskStatus& s) { s = parse_task_status(j.get<std::string>()); }

void to_json(json& j, const GradeScale& s) { j = {{"min", s.min}, {"max", s.max}}; }
void from_json(const json& j, GradeScale& s) {
  s.min = j.at("min").get<int>();
  s.max = j.at("max").get<int>();
}

json deadlines_to_json(const std::map<Phase, Timestamp>& deadlines) {
  json out = json::object();
  for (const auto& [phase, ts] : deadlines) out[std::string(to_string(phase))] = format_rfc3339(ts);
  return out;
}

std::map<Phase, Timestamp> deadlines_from_json(const json& j) {
  std::map<Phase, Timestamp> out;
  if (j.is_null()) return out;
  for (const auto& [key, value] : j.items()) {
    out.emplace(parse_phase(key), parse_rfc3339(value.get<std::string>()));
  }
  return out;
}

void to_json(json& j, const CourseConfig& c) {
  j = {{"condition", c.condition},
       {"k", c.k},
       {"grade_min", c.scale.min},
       {"grade_max", c.scale.max},
       {"nudge_threshold", c.nudge_threshold},
       {"deadlines", deadlines_to_json(c.deadlines)},
       {"seed", c.seed}};
}

void from_json(const json& j, CourseConfig& c) {
  c = CourseConfig{};
  c.condition = j.at("condition").get<Condition>();
  c.k = j.value("k", kDefaultFanOut);
  c.scale.min = j.value("grade_min", 0);
  c.scale.max = j.value("grade_max", 100);
  c.nudge_threshold = j.value("nudge_threshold", kDefaultNudgeThreshold);
  if (auto it = j.find("deadlines"); it != j.end()) c.deadlines = deadlines_from_json(*it);
  c.seed = j.value("seed", std::uint64_t{0});
}

void to_json(json& j, const Participant& p) {
  json history = json::array();
  for (const auto& e : p.usefulness_history) {
    history.push_back({{"round_id", e.round}, {"mean_rating", e.mean_rating}});
  }
  j = {{"id", p.id}, {"display_name", p.display_name}, {"usefulness_history", history}};
  if (p.intro) j["intro"] = *p.intro;
}

void from_json(const json& j, Participant& p) {
  p.id = j.at("id").get<ParticipantId>();
  p.display_name = j.at("display_name").get<std::string>();
  p.intro = optional_field<std::string>(j, "intro");
  p.usefulness_history.clear();
  for (const auto& e : j.at("usefulness_history")) {
    p.usefulness_history.push_back(
        {e.at("round_id").get<RoundId>(), e.at("mean_rating").get<double>()});
  }
}

void to_json(json& j, const CourseRound& r) {
  j = {{"round_id", r.id},
       {"ordinal", r.ordinal},
       {"condition", r.condition},
       {"phase", r.phase},
       {"k", r.k},
       {"scale", r.scale},
       {"nudge_threshold", r.nudge_threshold},
       {"roster", r.roster},
       {"deadlines", deadlines_to_json(r.deadlines)},
       {"rng_seed", r.rng_seed}};
}

void from_json(const json& j, CourseRound& r) {
  r.id = j.at("round_id").get<RoundId>();
  r.ordinal = j.at("ordinal").get<int>();
  r.condition = j.at("condition").get<Condition>();
  r.phase = j.at("phase").get<Phase>();
  r.k = j.at("k").get<int>();
  r.scale = j.at("scale").get<GradeScale>();
  r.nudge_threshold = j.at("nudge_threshold").get<int>();
  r.roster = j.at("roster").get<std::vector<ParticipantId>>();
  r.deadlines = deadlines_from_json(j.at("deadlines"));
  r.rng_seed = j.at("rng_seed").get<std::uint64_t>();
}

void to_json(json& j, const Submission& s) {
  j = {{"author", s.author},
       {"round_id", s.round},
       {"content_ref", s.content_ref},
       {"submitted_at", format_rfc3339(s.submitted_at)}};
}

void from_json(const json& j, Submission& s) {
  s.author = j.at("author").get<ParticipantId>();
  s.round = j.at("round_id").get<RoundId>();
  s.content_ref = j.at("content_ref").get<std::string>();
  s.submitted_at = ts_field(j, "submitted_at");
}

void to_json(json& j, const ReviewTask& t) {
  j = {{"task_id", t.id},
       {"reviewer", t.reviewer},
       {"author", t.author},
       {"round_id", t.round},
       {"status", t.status}};
}

void from_json(const json& j, ReviewTask& t) {
  t.id = j.at("task_id").get<TaskId>();
  t.reviewer = j.at("reviewer").get<ParticipantId>();
  t.author = j.at("author").get<ParticipantId>();
  t.round = j.at("round_id").get<RoundId>();
  t.status = j.at("status").get<TaskStatus>();
}

void to_json(json& j, const Review& r) {
  j = {{"review_id", r.id},
       {"task_id", r.task},
       {"prompts", r.prompts},
       {"grade", r.grade},
       {"created_at", format_rfc3339(r.created_at)}};
}

void from_json(const json& j, Review& r) {
  r.id = j.at("review_id").get<ReviewId>();
  r.task = j.at("task_id").get<TaskId>();
  r.prompts = j.at("prompts").get<Prompts>();
  r.grade = j.at("grade").get<int>();
  r.created_at = ts_field(j, "created_at");
}

void to_json(json& j, const UsefulnessRating& r) {
  j = {{"review_id", r.review}, {"stars", r.stars}, {"rated_at", format_rfc3339(r.rated_at)}};
}

void from_json(const json& j, UsefulnessRating& r) {
  r.review = j.at("review_id").get<ReviewId>();
  r.stars = j.at("stars").get<int>();
  r.rated_at = ts_field(j, "rated_at");
}

void to_json(json& j, const Message& m) {
  j = {{"review_id", m.review},
       {"sender", m.sender},
       {"body", m.body},
       {"sent_at", format_rfc3339(m.sent_at)}};
}

void from_json(const json& j, Message& m) {
  m.review = j.at("review_id").get<ReviewId>();
  m.sender = j.at("sender").get<ParticipantId>();
  m.body = j.at("body").get<std::string>();
  m.sent_at = ts_field(j, "sent_at");
}

void to_json(json& j, const GradeReport& g) {
  j = {{"participant", g.participant},
       {"round_id", g.round},
       {"per_review_grades", g.per_review_grades}};
  if (g.aggregate) j["aggregate"] = *g.aggregate;
}

void to_json(json& j, const CourseState& s) {
  json participants = json::array();
  for (const auto& [id, p] : s.participants) participants.push_back(p);
  json rounds = json::array();
  for (const auto& [id, r] : s.rounds) rounds.push_back(r);
  json submissions = json::array();
  for (const auto& [key, sub] : s.submissions) submissions.push_back(sub);
  json tasks = json::array();
  for (const auto& [id, t] : s.tasks) tasks.push_back(t);
  json reviews = json::array();
  for (const auto& [id, r] : s.reviews) reviews.push_back(r);
  json ratings = json::array();
  for (const auto& [id, r] : s.ratings) ratings.push_back(r);
  json threads = json::object();
  for (const auto& [id, msgs] : s.threads) threads[id.value] = msgs;
  json released = json::array();
  for (const auto& [round, participant] : s.released) {
    released.push_back({{"round_id", round}, {"participant", participant}});
  }
  j = {{"participants", participants}, {"rounds", rounds},
       {"submissions", submissions},   {"tasks", tasks},
       {"reviews", reviews},           {"ratings", ratings},
       {"threads", threads},           {"released", released},
       {"last_sequence", s.last_sequence}};
}

void from_json(const json& j, CourseState& s) {
  s = CourseState{};
  for (const auto& p : j.at("participants")) {
    auto participant = p.get<Participant>();
    s.participants.emplace(participant.id, std::move(participant));
  }
  for (const auto& r : j.at("rounds")) {
    auto round = r.get<CourseRound>();
    s.rounds.emplace(round.id, std::move(round));
  }
  for (const auto& sub : j.at("submissions")) {
    auto submission = sub.get<Submission>();
    s.submissions.emplace(std::pair{submission.round, submission.author}, std::move(submission));
  }
  for (const auto& t : j.at("tasks")) {
    auto task = t.get<ReviewTask>();
    s.tasks.emplace(task.id, std::move(task));
  }
  for (const auto& r : j.at("reviews")) {
    auto review = r.get<Review>();
    s.reviews.emplace(review.id, std::move(review));
  }
  for (const auto& r : j.at("ratings")) {
    auto rating = r.get<UsefulnessRating>();
    s.ratings.emplace(rating.review, rating);
  }
  for (const auto& [id, msgs] : j.at("threads").items()) {
    s.threads.emplace(ReviewId{id}, msgs.get<std::vector<Message>>());
  }
  for (const auto& r : j.at("released")) {
    s.released.emplace(r.at("round_id").get<RoundId>(), r.at("participant").get<ParticipantId>());
  }
  s.last_sequence = j.at("last_sequence").get<std::uint64_t>();
}

}  // namespace ipr
