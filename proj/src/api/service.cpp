#include "ipr/api/service.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>
#include <random>

#include <spdlog/spdlog.h>

#include "ipr/api/routes.hpp"
#include "ipr/api/views.hpp"
#include "ipr/serialize.hpp"
#include "ipr/store/snapshot.hpp"

namespace ipr::api {

namespace fs = std::filesystem;
using nlohmann::json;

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotYourTask:
    case ErrorCode::NotAParty:
    case ErrorCode::NotReceiver:
    case ErrorCode::UnknownParticipant:
      return 403;
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::IllegalTransition:
    case ErrorCode::InsufficientSubmissions:
    case ErrorCode::IncompleteReviews:
    case ErrorCode::PhaseClosed:
    case ErrorCode::BlindModeActive:
    case ErrorCode::AlreadyReviewed:
    case ErrorCode::AlreadyRated:
    case ErrorCode::GradesPending:
    case ErrorCode::TooFewSubmitters:
    case ErrorCode::SequenceConflict:
    case ErrorCode::GradesNotReleased:
      return 409;
    case ErrorCode::TooLong:
    case ErrorCode::AllPromptsEmpty:
    case ErrorCode::GradeOutOfRange:
    case ErrorCode::StarsOutOfRange:
    case ErrorCode::EmptyBody:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::TooFewSamples:
    case ErrorCode::ZeroVariance:
      return 422;
    case ErrorCode::StorageFailure:
    case ErrorCode::CorruptLog:
    case ErrorCode::VersionMismatch:
    case ErrorCode::IoFailure:
      return 503;
  }
  return 503;
}

std::string random_token() {
  static thread_local std::random_device device;
  std::string out;
  out.reserve(32);
  constexpr char kHex[] = "0123456789abcdef";
  for (int word = 0; word < 4; ++word) {
    auto bits = static_cast<std::uint32_t>(device());
    for (int nibble = 0; nibble < 8; ++nibble, bits >>= 4) out.push_back(kHex[bits & 0xF]);
  }
  return out;
}

struct Service::Hosted {
  std::string id;
  fs::path dir;
  CourseConfig config;
  std::vector<RosterEntry> roster;
  Course course;
  std::optional<store::EventLog> log;
  mutable std::shared_mutex mutex;

  explicit Hosted(std::string course_id) : id(course_id), course(std::move(course_id)) {}
};

struct Service::Caller {
  bool admin = false;
  ParticipantId participant;
  std::string course;
};

namespace {

Response error_response(int status, std::string_view code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

void write_json_file(const fs::path& path, const json& j) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) throw Error(ErrorCode::StorageFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot replace " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageFailure, "cannot read " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::StorageFailure, path.string() + " is not valid JSON");
  return j;
}

const std::string& string_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
  }
  return it->get_ref<const std::string&>();
}

int int_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < -1'000'000'000 || v > 1'000'000'000) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' is out of range");
  }
  return static_cast<int>(v);
}

bool bool_field(const json& body, const char* key, bool fallback) {
  const auto it = body.find(key);
  if (it == body.end()) return fallback;
  if (!it->is_boolean()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a boolean");
  return it->get<bool>();
}

/// Applies config overrides present in `body` on top of `base`.
CourseConfig config_from(const json& body, CourseConfig base) {
  if (body.contains("condition")) base.condition = parse_condition(string_field(body, "condition"));
  if (body.contains("k")) base.k = int_field(body, "k");
  if (body.contains("grade_min")) base.scale.min = int_field(body, "grade_min");
  if (body.contains("grade_max")) base.scale.max = int_field(body, "grade_max");
  if (body.contains("nudge_threshold")) base.nudge_threshold = int_field(body, "nudge_threshold");
  if (body.contains("seed")) {
    const auto& s = body["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw Error(ErrorCode::InvalidArgument, "'seed' must be a non-negative integer");
    }
    base.seed = s.get<std::uint64_t>();
  }
  if (body.contains("deadlines")) {
    if (!body["deadlines"].is_object()) throw Error(ErrorCode::InvalidArgument, "'deadlines' must be an object");
    base.deadlines = deadlines_from_json(body["deadlines"]);
  }
  if (base.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (base.scale.min > base.scale.max) throw Error(ErrorCode::InvalidArgument, "grade_min exceeds grade_max");
  if (base.nudge_threshold < 0) throw Error(ErrorCode::InvalidArgument, "nudge_threshold is negative");
  return base;
}

json tokens_json(const std::string& course_id, const std::vector<AccessToken>& issued) {
  json people = json::array();
  for (const auto& t : issued) {
    people.push_back({{"participant_id", t.participant},
                      {"token", t.token},
                      {"expires_at", format_rfc3339(t.expires_at)}});
  }
  return {{"course_id", course_id}, {"participants", std::move(people)}};
}

/// The course a resource id belongs to; ids are "<course>-<kind><n>...".
std::string course_for(const std::map<std::string, std::string>& params) {
  if (auto it = params.find("c"); it != params.end()) return it->second;
  for (const char* key : {"r", "t", "v", "p"}) {
    if (auto it = params.find(key); it != params.end()) return course_of(it->second);
  }
  return {};
}

/// `?reviewer=` / `?participant=` may only name the caller.
void check_self(const Request& request, const char* key, const ParticipantId& caller) {
  const auto it = request.query.find(key);
  if (it != request.query.end() && it->second != caller.value) {
    throw Error(ErrorCode::NotAParty, std::string(key) + " must be the authenticated participant");
  }
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.new_token) options_.new_token = random_token;
  std::error_code ec;
  fs::create_directories(options_.data_dir, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + options_.data_dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(options_.data_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "course.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) load_course(dir);
}

Service::~Service() = default;

void Service::load_course(const fs::path& dir) {
  const auto meta = read_json_file(dir / "course.json");
  auto h = std::make_unique<Hosted>(meta.at("course_id").get<std::string>());
  h->dir = dir;
  h->config = meta.at("config").get<CourseConfig>();
  for (const auto& p : meta.at("participants")) {
    h->roster.push_back({p.at("participant_id").get<ParticipantId>(), p.at("display_name").get<std::string>()});
  }

  std::optional<store::Snapshot> snap;
  if (fs::exists(dir / "snapshot.json")) {
    try {
      snap = store::read_snapshot(dir / "snapshot.json");
    } catch (const Error& e) {
      spdlog::warn("course {}: ignoring snapshot: {}", h->id, e.what());
    }
  }
  const auto log_path = dir / "events.log";
  const auto before = store::read_log(log_path);
  if (before.corruption) {
    spdlog::warn("course {}: log damaged after sequence {} ({}); truncating to {} bytes", h->id,
                 before.corruption->last_good_sequence, before.corruption->reason, before.good_bytes);
  }
  h->log = store::EventLog::open(log_path, options_.durability, store::EventLog::OpenMode::Repair);
  if (snap && snap->covering_seq > h->log->last_sequence()) {
    spdlog::warn("course {}: snapshot at {} is ahead of the log; replaying the log alone", h->id,
                 snap->covering_seq);
    snap.reset();
  }
  h->course = store::replay_log(h->id, log_path, snap);

  auto* raw = h.get();
  h->course.set_event_sink([raw](const Event& e) { raw->log->append(e); });

  if (fs::exists(dir / "tokens.json")) {
    for (const auto& t : read_json_file(dir / "tokens.json")) {
      AccessToken token{t.at("token").get<std::string>(), t.at("participant").get<ParticipantId>(), h->id,
                        parse_rfc3339(t.at("expires_at").get<std::string>())};
      tokens_.emplace(token.token, std::move(token));
    }
  }
  spdlog::info("course {}: loaded {} events", h->id, h->course.state().last_sequence);
  courses_.emplace(h->id, std::move(h));
}

std::vector<std::string> Service::course_ids() const {
  std::shared_lock lock(courses_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : courses_) out.push_back(id);
  return out;
}

Service::Hosted& Service::hosted(const std::string& course_id) const {
  std::shared_lock lock(courses_mutex_);
  const auto it = courses_.find(course_id);
  if (it == courses_.end()) throw Error(ErrorCode::NotFound, "no course " + course_id);
  return *it->second;
}

CourseState Service::course_state(const std::string& course_id) const {
  auto& h = hosted(course_id);
  std::shared_lock lock(h.mutex);
  return h.course.state();
}

// Caller holds h.mutex exclusively.
std::vector<AccessToken> Service::issue_tokens(Hosted& h, const std::vector<ParticipantId>& who) {
  std::vector<AccessToken> issued;
  const auto expires = options_.clock() + options_.token_ttl;
  {
    std::unique_lock lock(tokens_mutex_);
    std::erase_if(tokens_, [&](const auto& kv) {
      return kv.second.course == h.id &&
             std::find(who.begin(), who.end(), kv.second.participant) != who.end();
    });
    for (const auto& p : who) {
      AccessToken t{options_.new_token(), p, h.id, expires};
      tokens_.emplace(t.token, t);
      issued.push_back(std::move(t));
    }
  }
  save_tokens(h);
  return issued;
}

void Service::save_tokens(const Hosted& h) const {
  json out = json::array();
  {
    std::shared_lock lock(tokens_mutex_);
    for (const auto& [_, t] : tokens_) {
      if (t.course != h.id) continue;
      out.push_back({{"token", t.token}, {"participant", t.participant},
                     {"expires_at", format_rfc3339(t.expires_at)}});
    }
  }
  write_json_file(h.dir / "tokens.json", out);
}

Response Service::handle(const Request& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(422, to_string(ErrorCode::InvalidArgument), e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", request.method, request.path, e.what());
    return error_response(500, "Internal", "internal error");
  }
}

Response Service::dispatch(const Request& request) {
  MatchFailure failure{};
  const auto match = match_route(request.method, request.path, &failure);
  if (!match) {
    return failure == MatchFailure::MethodNotAllowed
               ? error_response(405, "MethodNotAllowed", request.method + " is not allowed here")
               : error_response(404, to_string(ErrorCode::NotFound), "no such endpoint");
  }
  const auto& route = *match->route;
  const auto& params = match->params;

  Caller caller;
  const auto course_id = course_for(params);
  if (route.access == Access::Admin) {
    if (options_.admin_token.empty() || request.bearer != options_.admin_token) {
      return error_response(401, "Unauthorized", "admin token required");
    }
    caller.admin = true;
  } else if (route.access == Access::Participant) {
    std::shared_lock lock(tokens_mutex_);
    const auto it = tokens_.find(request.bearer);
    if (request.bearer.empty() || it == tokens_.end()) {
      return error_response(401, "Unauthorized", "missing or unknown token");
    }
    if (it->second.expires_at <= options_.clock()) return error_response(401, "Unauthorized", "token expired");
    if (it->second.course != course_id) {
      return error_response(401, "Unauthorized", "token is not valid for this course");
    }
    caller.participant = it->second.participant;
    caller.course = it->second.course;
  }

  json body = json::object();
  if (!request.body.empty()) {
    body = json::parse(request.body, nullptr, false);
    if (body.is_discarded()) return error_response(400, "MalformedJson", "request body is not valid JSON");
    if (!body.is_object()) return error_response(400, "MalformedJson", "request body must be a JSON object");
  }

  const auto now = options_.clock();
  switch (route.endpoint) {
    case Endpoint::Health:
      return {200, {{"status", "ok"}}};

    case Endpoint::CreateCourse: {
      const auto it = body.find("participants");
      if (it == body.end() || !it->is_array() || it->empty()) {
        throw Error(ErrorCode::InvalidArgument, "'participants' must be a non-empty array");
      }
      const auto config = config_from(body, CourseConfig{});
      std::vector<std::string> names;
      for (const auto& p : *it) {
        if (!p.is_object()) throw Error(ErrorCode::InvalidArgument, "participants must be objects");
        const auto& name = string_field(p, "display_name");
        if (name.find_first_not_of(" \t\r\n") == std::string::npos) {
          throw Error(ErrorCode::InvalidArgument, "display_name is empty");
        }
        names.push_back(name);
      }

      std::unique_lock lock(courses_mutex_);
      int next = 1;
      for (const auto& [id, _] : courses_) {
        if (id.size() > 1 && id[0] == 'c') next = std::max(next, std::atoi(id.c_str() + 1) + 1);
      }
      auto h = std::make_unique<Hosted>("c" + std::to_string(next));
      h->dir = options_.data_dir / h->id;
      h->config = config;
      json people = json::array();
      for (std::size_t i = 0; i < names.size(); ++i) {
        RosterEntry entry{ParticipantId{h->id + "-p" + std::to_string(i + 1)}, names[i]};
        people.push_back({{"participant_id", entry.id}, {"display_name", entry.display_name}});
        h->roster.push_back(std::move(entry));
      }
      std::error_code ec;
      fs::create_directories(h->dir, ec);
      if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + h->dir.string());
      write_json_file(h->dir / "course.json", {{"course_id", h->id},
                                               {"config", config},
                                               {"participants", people},
                                               {"created_at", format_rfc3339(now)}});
      h->log = store::EventLog::open(h->dir / "events.log", options_.durability);
      auto* raw = h.get();
      h->course.set_event_sink([raw](const Event& e) { raw->log->append(e); });

      std::vector<ParticipantId> ids;
      for (const auto& e : h->roster) ids.push_back(e.id);
      std::unique_lock course_lock(h->mutex);
      const auto issued = issue_tokens(*h, ids);
      const auto id = h->id;
      courses_.emplace(id, std::move(h));
      spdlog::info("created course {} with {} participants", id, ids.size());
      return {201, tokens_json(id, issued)};
    }

    case Endpoint::CreateRound: {
      auto& h = hosted(course_id);
      std::unique_lock lock(h.mutex);
      const auto config = config_from(body, h.config);
      const auto round = h.course.create_round(config, h.roster, now);
      return {201, round_view(h.course, round, nullptr)};
    }

    case Endpoint::IssueTokens: {
      auto& h = hosted(course_id);
      std::unique_lock lock(h.mutex);
      std::vector<ParticipantId> who;
      if (body.contains("participant_id")) {
        const ParticipantId p{string_field(body, "participant_id")};
        if (std::none_of(h.roster.begin(), h.roster.end(), [&](const auto& e) { return e.id == p; })) {
          throw Error(ErrorCode::NotFound, "no participant " + p.value);
        }
        who.push_back(p);
      } else {
        for (const auto& e : h.roster) who.push_back(e.id);
      }
      return {201, tokens_json(h.id, issue_tokens(h, who))};
    }

    case Endpoint::TakeSnapshot: {
      auto& h = hosted(course_id);
      std::unique_lock lock(h.mutex);
      const auto snap = store::snapshot(h.course);
      store::save_snapshot(h.dir / "snapshot.json", snap);
      return {201, {{"course_id", h.id}, {"covering_seq", snap.covering_seq}}};
    }

    case Endpoint::CourseState: {
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      return {200, {{"course_id", h.id},
                    {"last_sequence", h.course.state().last_sequence},
                    {"state", h.course.state()}}};
    }

    case Endpoint::AdvancePhase: {
      auto& h = hosted(course_id);
      const RoundId round{params.at("r")};
      const auto target = parse_phase(string_field(body, "target"));
      const bool force = bool_field(body, "force", false);
      std::unique_lock lock(h.mutex);
      h.course.advance_phase(round, target, now, force);
      return {200, round_view(h.course, round, nullptr)};
    }

    case Endpoint::GetRound: {
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      return {200, round_view(h.course, RoundId{params.at("r")}, &caller.participant)};
    }

    case Endpoint::SubmitAssignment: {
      auto& h = hosted(course_id);
      const auto& ref = string_field(body, "content_ref");
      std::unique_lock lock(h.mutex);
      const auto s = h.course.submit_assignment(RoundId{params.at("r")}, caller.participant, ref, now);
      return {201, submission_view(s)};
    }

    case Endpoint::PutIntro: {
      auto& h = hosted(course_id);
      if (params.at("p") != caller.participant.value) {
        throw Error(ErrorCode::NotAParty, "participants may only edit their own introduction");
      }
      const RoundId round{string_field(body, "round_id")};
      const auto& text = string_field(body, "intro");
      std::unique_lock lock(h.mutex);
      const auto p = h.course.record_intro(round, caller.participant, text, now);
      return {200, {{"participant_id", p.id}, {"intro", p.intro.value_or("")}}};
    }

    case Endpoint::ListTasks: {
      check_self(request, "reviewer", caller.participant);
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      return {200, task_list_view(h.course, RoundId{params.at("r")}, caller.participant)};
    }

    case Endpoint::SubmitReview: {
      auto& h = hosted(course_id);
      const auto it = body.find("prompts");
      if (it == body.end() || !it->is_array() || it->size() != kPromptCount) {
        throw Error(ErrorCode::InvalidArgument, "'prompts' must be an array of 4 strings");
      }
      Prompts prompts;
      for (std::size_t i = 0; i < kPromptCount; ++i) {
        if (!(*it)[i].is_string()) throw Error(ErrorCode::InvalidArgument, "'prompts' must be an array of 4 strings");
        prompts[i] = (*it)[i].get<std::string>();
      }
      const int grade = int_field(body, "grade");
      std::unique_lock lock(h.mutex);
      const auto review = h.course.submit_review(TaskId{params.at("t")}, caller.participant,
                                                 std::move(prompts), grade, now);
      return {201, review_receipt(h.course, review)};
    }

    case Endpoint::GetFeedback: {
      check_self(request, "participant", caller.participant);
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      const RoundId round{params.at("r")};
      if (!h.course.round(round).in_roster(caller.participant)) {
        throw Error(ErrorCode::UnknownParticipant, "not on this round's roster");
      }
      return {200, feedback_view(h.course, round, caller.participant)};
    }

    case Endpoint::RateReview: {
      auto& h = hosted(course_id);
      const int stars = int_field(body, "stars");
      std::unique_lock lock(h.mutex);
      const auto rating = h.course.rate_feedback(ReviewId{params.at("v")}, caller.participant, stars, now);
      return {201, rating_view(h.course, rating)};
    }

    case Endpoint::PostMessage: {
      auto& h = hosted(course_id);
      const auto& text = string_field(body, "body");
      std::unique_lock lock(h.mutex);
      const auto m = h.course.post_message(ReviewId{params.at("v")}, caller.participant, text, now);
      return {201, message_view(h.course, m)};
    }

    case Endpoint::ListMessages: {
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      const ReviewId review{params.at("v")};
      const auto& t = h.course.task_of(review);
      if (caller.participant != t.reviewer && caller.participant != t.author) {
        throw Error(ErrorCode::NotAParty, "only the reviewer and the reviewed author may read");
      }
      return {200, thread_view(h.course, review)};
    }

    case Endpoint::GetGrades: {
      check_self(request, "participant", caller.participant);
      auto& h = hosted(course_id);
      std::shared_lock lock(h.mutex);
      return {200, grade_view(h.course.grade_report(RoundId{params.at("r")}, caller.participant))};
    }
  }
  return error_response(404, to_string(ErrorCode::NotFound), "no such endpoint");
}

}  // namespace ipr::api
