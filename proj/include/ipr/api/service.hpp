#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipr/course.hpp"
#include "ipr/error.hpp"
#include "ipr/store/event_log.hpp"

namespace ipr::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string bearer;  // token from "Authorization: Bearer <token>", may be empty
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();
};

struct AccessToken {
  std::string token;
  ParticipantId participant;
  std::string course;
  Timestamp expires_at{};
};

struct ServiceOptions {
  std::filesystem::path data_dir;
  std::string admin_token;
  std::chrono::hours token_ttl{24 * 120};
  store::Durability durability = store::Durability::Fsync;
  std::function<Timestamp()> clock = now_utc;
  /// Source of new token strings; defaults to 128 random bits in hex.
  std::function<std::string()> new_token;
};

/// HTTP status for each domain error. Every code maps to exactly one status.
int status_for(ErrorCode code) noexcept;

/// 32 lowercase hex digits from std::random_device.
std::string random_token();

/// Transport-independent request handling over the course directories in
/// data_dir (DATA_DIR/<course>/{course.json, tokens.json, events.log,
/// snapshot.json}). Safe to call handle() from many threads: courses are
/// locked individually, reads share the lock.
class Service {
 public:
  /// Loads every course under data_dir. A torn or corrupt log tail is cut
  /// back to the last intact record before replay.
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  std::vector<std::string> course_ids() const;
  /// Throws Error(NotFound).
  CourseState course_state(const std::string& course_id) const;

 private:
  struct Hosted;
  struct Caller;

  Hosted& hosted(const std::string& course_id) const;
  void load_course(const std::filesystem::path& dir);
  std::vector<AccessToken> issue_tokens(Hosted& h, const std::vector<ParticipantId>& who);
  void save_tokens(const Hosted& h) const;

  Response dispatch(const Request& request);

  ServiceOptions options_;
  mutable std::shared_mutex courses_mutex_;
  std::map<std::string, std::unique_ptr<Hosted>> courses_;
  mutable std::shared_mutex tokens_mutex_;
  std::map<std::string, AccessToken> tokens_;
};

}  // namespace ipr::api
