#include "ipr/course.hpp"

#include <algorithm>
#include <cctype>

#include "ipr/serialize.hpp"

namespace ipr {

using nlohmann::json;

namespace {

bool blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

ReviewId review_id_for(const TaskId& task) {
  auto pos = task.value.rfind("-t");
  return ReviewId{task.value.substr(0, pos) + "-v" + task.value.substr(pos + 2)};
}

TaskId task_id_for(const ReviewId& review) {
  auto pos = review.value.rfind("-v");
  return TaskId{review.value.substr(0, pos) + "-t" + review.value.substr(pos + 2)};
}

std::uint64_t suffix_number(std::string_view id) {
  std::uint64_t n = 0;
  const auto pos = id.find_last_not_of("0123456789");
  for (auto c : id.substr(pos + 1)) n = n * 10 + static_cast<std::uint64_t>(c - '0');
  return n;
}

}  // namespace

std::optional<int> lower_median(std::vector<int> values) {
  if (values.empty()) return std::nullopt;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

MatchingPolicy policy_for(Condition condition) noexcept {
  return condition == Condition::IdentifiedIncentive ? MatchingPolicy::Incentive
                                                     : MatchingPolicy::Random;
}

std::string course_of(std::string_view id) {
  return std::string(id.substr(0, id.find('-')));
}

Course::Course(std::string id) : id_(std::move(id)) {}

Course::Course(std::string id, CourseState state) : id_(std::move(id)), state_(std::move(state)) {}

// ---- commands ---------------------------------------------------------------

RoundId Course::create_round(const CourseConfig& config, std::span<const RosterEntry> roster,
                             Timestamp now) {
  if (config.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (config.scale.min > config.scale.max) {
    throw Error(ErrorCode::InvalidArgument, "grade scale bounds are inverted");
  }
  if (roster.empty()) throw Error(ErrorCode::InvalidArgument, "roster is empty");

  json entries = json::array();
  std::set<ParticipantId> seen;
  for (const auto& entry : roster) {
    if (entry.id.value.empty()) throw Error(ErrorCode::InvalidArgument, "empty participant id");
    if (!seen.insert(entry.id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate roster entry " + entry.id.value);
    }
    entries.push_back({{"id", entry.id}, {"display_name", entry.display_name}});
  }

  const int ordinal = static_cast<int>(state_.rounds.size()) + 1;
  RoundId round{id_ + "-r" + std::to_string(ordinal)};
  emit(EventKind::RoundCreated,
       {{"round_id", round},
        {"ordinal", ordinal},
        {"config", config},
        {"rng_seed", mix_seed(config.seed, static_cast<std::uint64_t>(ordinal))},
        {"roster", entries}},
       now);
  return round;
}

Submission Course::submit_assignment(const RoundId& round_id, const ParticipantId& participant,
                                     std::string content_ref, Timestamp now) {
  const auto& r = round(round_id);
  if (r.phase != Phase::Submission) {
    throw Error(ErrorCode::PhaseClosed, "submissions are closed for " + round_id.value);
  }
  if (!r.in_roster(participant)) {
    throw Error(ErrorCode::UnknownParticipant, participant.value + " is not on the roster");
  }
  if (blank(content_ref)) throw Error(ErrorCode::InvalidArgument, "content_ref is empty");

  emit(EventKind::SubmissionMade,
       {{"round_id", round_id}, {"author", participant}, {"content_ref", std::move(content_ref)}},
       now);
  return *submission(round_id, participant);
}

Participant Course::record_intro(const RoundId& round_id, const ParticipantId& participant,
                                 std::string text, Timestamp now) {
  const auto& r = round(round_id);
  if (!r.in_roster(participant)) {
    throw Error(ErrorCode::UnknownParticipant, participant.value + " is not on the roster");
  }
  if (is_blind(r.condition)) {
    throw Error(ErrorCode::BlindModeActive, "introductions are disabled in blind rounds");
  }
  if (blank(text)) throw Error(ErrorCode::EmptyBody, "introduction is empty");
  if (utf8_length(text) > kMaxIntroLength) {
    throw Error(ErrorCode::TooLong, "introduction exceeds 500 characters");
  }
  emit(EventKind::IntroRecorded,
       {{"round_id", round_id}, {"participant", participant}, {"intro", std::move(text)}}, now);
  return this->participant(participant);
}

CourseRound Course::advance_phase(const RoundId& round_id, Phase target, Timestamp now,
                                  bool force) {
  const CourseRound r = round(round_id);
  if (static_cast<int>(target) != static_cast<int>(r.phase) + 1) {
    throw Error(ErrorCode::IllegalTransition, std::string("cannot move from ") +
                                                  std::string(to_string(r.phase)) + " to " +
                                                  std::string(to_string(target)));
  }
  json payload = {{"round_id", round_id}, {"from", r.phase}, {"to", target}, {"forced", force}};

  switch (target) {
    case Phase::Reviewing: {
      const auto subs = submitters(round_id);
      if (subs.size() < 2) {
        throw Error(ErrorCode::InsufficientSubmissions,
                    "at least two submissions are needed to start reviewing");
      }
      const auto policy = policy_for(r.condition);
      const auto scores = policy == MatchingPolicy::Incentive ? usefulness_scores(round_id)
                                                              : ScoreMap{};
      const auto set = assign_reviewers(subs, policy, r.k, scores, r.rng_seed, round_id.value);
      json tasks = json::array();
      std::size_t n = 0;
      for (const auto& pair : set.pairs) {
        tasks.push_back({{"task_id", round_id.value + "-t" + std::to_string(++n)},
                         {"reviewer", pair.reviewer},
                         {"author", pair.author}});
      }
      emit(EventKind::PhaseAdvanced, std::move(payload), now);
      emit(EventKind::AssignmentCreated,
           {{"round_id", round_id},
            {"policy", to_string(set.policy)},
            {"seed", set.seed},
            {"tasks", std::move(tasks)}},
           now);
      break;
    }
    case Phase::Rating: {
      json expired = json::array();
      for (const auto& t : tasks_in_round(round_id)) {
        if (t.status == TaskStatus::Pending) expired.push_back(t.id);
      }
      if (!expired.empty() && !force) {
        throw Error(ErrorCode::IncompleteReviews,
                    std::to_string(expired.size()) + " review tasks are still pending");
      }
      payload["expired_tasks"] = std::move(expired);
      emit(EventKind::PhaseAdvanced, std::move(payload), now);
      // Participants with nothing to rate see their (empty) grades at once.
      std::vector<ParticipantId> roster = r.roster;
      std::sort(roster.begin(), roster.end());
      for (const auto& p : roster) {
        if (reviews_received(round_id, p).empty() &&
            !state_.released.contains({round_id, p})) {
          emit(EventKind::GradesReleased, {{"round_id", round_id}, {"participant", p}}, now);
        }
      }
      break;
    }
    case Phase::Released:
      emit(EventKind::PhaseAdvanced, std::move(payload), now);
      break;
    case Phase::Submission:
      break;  // unreachable: nothing precedes SUBMISSION
  }
  return round(round_id);
}

Review Course::submit_review(const TaskId& task_id, const ParticipantId& caller, Prompts prompts,
                             int grade, Timestamp now) {
  const auto& t = task(task_id);
  const auto& r = round(t.round);
  if (r.phase != Phase::Reviewing) {
    throw Error(ErrorCode::PhaseClosed, "reviewing is closed for " + r.id.value);
  }
  if (caller != t.reviewer) throw Error(ErrorCode::NotYourTask, "task belongs to another reviewer");
  if (t.status != TaskStatus::Pending) {
    throw Error(ErrorCode::AlreadyReviewed, "task " + task_id.value + " was already reviewed");
  }
  for (const auto& prompt : prompts) {
    if (utf8_length(prompt) > kMaxPromptLength) {
      throw Error(ErrorCode::TooLong, "a feedback field exceeds 4000 characters");
    }
  }
  if (std::all_of(prompts.begin(), prompts.end(), [](const auto& p) { return blank(p); })) {
    throw Error(ErrorCode::AllPromptsEmpty, "at least one feedback field must be filled in");
  }
  if (!r.scale.contains(grade)) {
    throw Error(ErrorCode::GradeOutOfRange, "grade " + std::to_string(grade) + " is outside [" +
                                                std::to_string(r.scale.min) + ", " +
                                                std::to_string(r.scale.max) + "]");
  }
  const auto review_id = review_id_for(task_id);
  emit(EventKind::ReviewSubmitted,
       {{"task_id", task_id}, {"review_id", review_id}, {"prompts", prompts}, {"grade", grade}},
       now);
  return review(review_id);
}

UsefulnessRating Course::rate_feedback(const ReviewId& review_id, const ParticipantId& caller,
                                       int stars, Timestamp now) {
  const auto& t = task_of(review_id);
  const auto& r = round(t.round);
  if (r.phase != Phase::Rating && r.phase != Phase::Released) {
    throw Error(ErrorCode::PhaseClosed, "rating is not open for " + r.id.value);
  }
  if (caller != t.author) throw Error(ErrorCode::NotReceiver, "only the reviewed author may rate");
  if (state_.ratings.contains(review_id)) {
    throw Error(ErrorCode::AlreadyRated, "review " + review_id.value + " is already rated");
  }
  if (stars < kMinStars || stars > kMaxStars) {
    throw Error(ErrorCode::StarsOutOfRange, "stars must be between 1 and 5");
  }
  emit(EventKind::FeedbackRated, {{"review_id", review_id}, {"stars", stars}}, now);
  if (grades_visible(t.round, caller) && !state_.released.contains({t.round, caller})) {
    emit(EventKind::GradesReleased, {{"round_id", t.round}, {"participant", caller}}, now);
  }
  return state_.ratings.at(review_id);
}

Message Course::post_message(const ReviewId& review_id, const ParticipantId& sender,
                             std::string body, Timestamp now) {
  const auto& t = task_of(review_id);
  if (sender != t.reviewer && sender != t.author) {
    throw Error(ErrorCode::NotAParty, "only the reviewer and the reviewed author may post");
  }
  const auto& r = round(t.round);
  if (r.phase != Phase::Rating && r.phase != Phase::Released) {
    throw Error(ErrorCode::PhaseClosed, "conversations open in the rating phase");
  }
  if (blank(body)) throw Error(ErrorCode::EmptyBody, "message body is empty");
  if (utf8_length(body) > kMaxMessageLength) {
    throw Error(ErrorCode::TooLong, "message exceeds 2000 characters");
  }
  emit(EventKind::MessagePosted,
       {{"review_id", review_id}, {"sender", sender}, {"body", std::move(body)}}, now);
  return state_.threads.at(review_id).back();
}

void Course::emit(EventKind kind, json payload, Timestamp now) {
  Event event{state_.last_sequence + 1, now, kind, std::move(payload)};
  if (sink_) sink_(event);
  apply(event);
}

// ---- event folding ----------------------------------------------------------

void Course::apply(const Event& event) {
  if (event.sequence != state_.last_sequence + 1) {
    throw Error(ErrorCode::SequenceConflict,
                "expected sequence " + std::to_string(state_.last_sequence + 1) + ", got " +
                    std::to_string(event.sequence));
  }
  const auto& p = event.payload;
  switch (event.kind) {
    case EventKind::RoundCreated: apply_round_created(p); break;
    case EventKind::SubmissionMade: {
      Submission s{p.at("author").get<ParticipantId>(), p.at("round_id").get<RoundId>(),
                   p.at("content_ref").get<std::string>(), event.occurred_at};
      state_.submissions.insert_or_assign(std::pair{s.round, s.author}, std::move(s));
      break;
    }
    case EventKind::IntroRecorded: apply_intro(p); break;
    case EventKind::PhaseAdvanced: apply_phase(p); break;
    case EventKind::AssignmentCreated: apply_assignment(p); break;
    case EventKind::ReviewSubmitted: {
      Review review{p.at("review_id").get<ReviewId>(), p.at("task_id").get<TaskId>(),
                    p.at("prompts").get<Prompts>(), p.at("grade").get<int>(), event.occurred_at};
      state_.tasks.at(review.task).status = TaskStatus::Reviewed;
      state_.reviews.insert_or_assign(review.id, std::move(review));
      break;
    }
    case EventKind::FeedbackRated: {
      UsefulnessRating rating{p.at("review_id").get<ReviewId>(), p.at("stars").get<int>(),
                              event.occurred_at};
      state_.tasks.at(task_id_for(rating.review)).status = TaskStatus::Rated;
      state_.ratings.insert_or_assign(rating.review, rating);
      break;
    }
    case EventKind::MessagePosted: {
      Message m{p.at("review_id").get<ReviewId>(), p.at("sender").get<ParticipantId>(),
                p.at("body").get<std::string>(), event.occurred_at};
      state_.threads[m.review].push_back(std::move(m));
      break;
    }
    case EventKind::GradesReleased: apply_release(p); break;
  }
  state_.last_sequence = event.sequence;
}

void Course::apply_round_created(const json& p) {
  const auto config = p.at("config").get<CourseConfig>();
  CourseRound r;
  r.id = p.at("round_id").get<RoundId>();
  r.ordinal = p.at("ordinal").get<int>();
  r.condition = config.condition;
  r.k = config.k;
  r.scale = config.scale;
  r.nudge_threshold = config.nudge_threshold;
  r.deadlines = config.deadlines;
  r.rng_seed = p.at("rng_seed").get<std::uint64_t>();
  for (const auto& entry : p.at("roster")) {
    auto id = entry.at("id").get<ParticipantId>();
    if (!state_.participants.contains(id)) {
      state_.participants.emplace(
          id, Participant{id, entry.at("display_name").get<std::string>(), std::nullopt, {}});
    }
    r.roster.push_back(std::move(id));
  }
  state_.rounds.insert_or_assign(r.id, std::move(r));
}

void Course::apply_intro(const json& p) {
  state_.participants.at(p.at("participant").get<ParticipantId>()).intro =
      p.at("intro").get<std::string>();
}

void Course::apply_phase(const json& p) {
  auto& r = mutable_round(p.at("round_id").get<RoundId>());
  r.phase = p.at("to").get<Phase>();
  if (auto it = p.find("expired_tasks"); it != p.end()) {
    for (const auto& t : *it) state_.tasks.at(t.get<TaskId>()).status = TaskStatus::Expired;
  }
  if (r.phase != Phase::Released) return;

  std::map<ParticipantId, std::pair<int, int>> totals;  // reviewer -> (sum, count)
  for (const auto& [review_id, rating] : state_.ratings) {
    const auto& t = state_.tasks.at(task_id_for(review_id));
    if (t.round != r.id) continue;
    auto& [sum, count] = totals[t.reviewer];
    sum += rating.stars;
    ++count;
  }
  for (const auto& [reviewer, total] : totals) {
    state_.participants.at(reviewer).usefulness_history.push_back(
        {r.id, static_cast<double>(total.first) / total.second});
  }
}

void Course::apply_assignment(const json& p) {
  const auto round_id = p.at("round_id").get<RoundId>();
  for (const auto& t : p.at("tasks")) {
    ReviewTask task{t.at("task_id").get<TaskId>(), t.at("reviewer").get<ParticipantId>(),
                    t.at("author").get<ParticipantId>(), round_id, TaskStatus::Pending};
    state_.tasks.insert_or_assign(task.id, std::move(task));
  }
}

void Course::apply_release(const json& p) {
  state_.released.emplace(p.at("round_id").get<RoundId>(),
                          p.at("participant").get<ParticipantId>());
}

// ---- queries ----------------------------------------------------------------

const CourseRound& Course::round(const RoundId& id) const {
  auto it = state_.rounds.find(id);
  if (it == state_.rounds.end()) throw Error(ErrorCode::NotFound, "no round " + id.value);
  return it->second;
}

CourseRound& Course::mutable_round(const RoundId& id) {
  auto it = state_.rounds.find(id);
  if (it == state_.rounds.end()) throw Error(ErrorCode::NotFound, "no round " + id.value);
  return it->second;
}

const Participant& Course::participant(const ParticipantId& id) const {
  auto it = state_.participants.find(id);
  if (it == state_.participants.end()) {
    throw Error(ErrorCode::UnknownParticipant, "no participant " + id.value);
  }
  return it->second;
}

const ReviewTask& Course::task(const TaskId& id) const {
  auto it = state_.tasks.find(id);
  if (it == state_.tasks.end()) throw Error(ErrorCode::NotFound, "no task " + id.value);
  return it->second;
}

const Review& Course::review(const ReviewId& id) const {
  auto it = state_.reviews.find(id);
  if (it == state_.reviews.end()) throw Error(ErrorCode::NotFound, "no review " + id.value);
  return it->second;
}

const ReviewTask& Course::task_of(const ReviewId& review_id) const {
  return task(review(review_id).task);
}

const Submission* Course::submission(const RoundId& round, const ParticipantId& author) const {
  auto it = state_.submissions.find({round, author});
  return it == state_.submissions.end() ? nullptr : &it->second;
}

std::optional<UsefulnessRating> Course::rating(const ReviewId& review) const {
  auto it = state_.ratings.find(review);
  if (it == state_.ratings.end()) return std::nullopt;
  return it->second;
}

const std::vector<Message>& Course::thread(const ReviewId& review_id) const {
  static const std::vector<Message> kEmpty;
  (void)review(review_id);
  auto it = state_.threads.find(review_id);
  return it == state_.threads.end() ? kEmpty : it->second;
}

std::vector<ReviewTask> Course::tasks_in_round(const RoundId& round_id) const {
  std::vector<ReviewTask> out;
  for (const auto& [id, t] : state_.tasks) {
    if (t.round == round_id) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const ReviewTask& a, const ReviewTask& b) {
    return suffix_number(a.id.value) < suffix_number(b.id.value);
  });
  return out;
}

std::vector<ReviewTask> Course::tasks_for_reviewer(const RoundId& round_id,
                                                   const ParticipantId& reviewer) const {
  auto all = tasks_in_round(round_id);
  std::erase_if(all, [&](const ReviewTask& t) { return t.reviewer != reviewer; });
  return all;
}

std::vector<Review> Course::reviews_received(const RoundId& round_id,
                                             const ParticipantId& author) const {
  std::vector<Review> out;
  for (const auto& [id, t] : state_.tasks) {
    if (t.round != round_id || t.author != author) continue;
    if (auto it = state_.reviews.find(review_id_for(t.id)); it != state_.reviews.end()) {
      out.push_back(it->second);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Review& a, const Review& b) { return a.id < b.id; });
  return out;
}

std::vector<ParticipantId> Course::submitters(const RoundId& round_id) const {
  const auto& r = round(round_id);
  std::vector<ParticipantId> out;
  for (const auto& p : r.roster) {
    if (state_.submissions.contains({round_id, p})) out.push_back(p);
  }
  return out;
}

bool Course::grades_visible(const RoundId& round_id, const ParticipantId& participant) const {
  const auto& r = round(round_id);
  if (r.phase < Phase::Rating) return false;
  for (const auto& review : reviews_received(round_id, participant)) {
    if (!state_.ratings.contains(review.id)) return false;
  }
  return true;
}

GradeReport Course::grade_report(const RoundId& round_id, const ParticipantId& participant) const {
  const auto& r = round(round_id);
  if (!r.in_roster(participant)) {
    throw Error(ErrorCode::UnknownParticipant, participant.value + " is not on the roster");
  }
  if (!grades_visible(round_id, participant)) {
    throw Error(ErrorCode::GradesPending, "rate all received feedback to see grades");
  }
  GradeReport report{participant, round_id, {}, std::nullopt};
  for (const auto& review : reviews_received(round_id, participant)) {
    report.per_review_grades.push_back(review.grade);
  }
  report.aggregate = lower_median(report.per_review_grades);
  return report;
}

std::vector<int> Course::prior_stars(const ParticipantId& participant,
                                     const RoundId& before) const {
  const int limit = round(before).ordinal;
  std::vector<int> stars;
  for (const auto& [review_id, rating] : state_.ratings) {
    const auto& t = state_.tasks.at(task_id_for(review_id));
    if (t.reviewer == participant && round(t.round).ordinal < limit) {
      stars.push_back(rating.stars);
    }
  }
  return stars;
}

ScoreMap Course::usefulness_scores(const RoundId& round_id) const {
  const auto& r = round(round_id);
  std::map<ParticipantId, std::vector<int>> stars;
  for (const auto& [review_id, rating] : state_.ratings) {
    const auto& t = state_.tasks.at(task_id_for(review_id));
    if (round(t.round).ordinal < r.ordinal) stars[t.reviewer].push_back(rating.stars);
  }
  ScoreMap scores;
  for (const auto& p : r.roster) {
    auto it = stars.find(p);
    scores[p] = usefulness_score(p, it == stars.end() ? std::span<const int>{}
                                                      : std::span<const int>{it->second})
                    .value;
  }
  return scores;
}

AssignmentSet Course::assignment(const RoundId& round_id) const {
  const auto& r = round(round_id);
  AssignmentSet set{round_id.value, {}, policy_for(r.condition), r.rng_seed};
  for (const auto& t : tasks_in_round(round_id)) set.pairs.push_back({t.reviewer, t.author});
  return set;
}

}  // namespace ipr
