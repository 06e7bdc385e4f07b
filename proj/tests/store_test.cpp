#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include <unistd.h>

#include <boost/crc.hpp>

#include "fixtures.hpp"
#include "ipr/error.hpp"
#include "ipr/serialize.hpp"
#include "ipr/store/event_log.hpp"
#include "ipr/store/snapshot.hpp"

using namespace ipr;
using namespace ipr::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("ipr_store_test_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

/// A live course whose events go to `log`.
struct LoggedCourse {
  store::EventLog log;
  Course course{"c1"};

  explicit LoggedCourse(const fs::path& path)
      : log(store::EventLog::open(path, store::Durability::Flush)) {
    course.set_event_sink([this](const Event& e) { log.append(e); });
  }
};

/// Drives one full round to RELEASED with every review rated.
RoundId full_round(Course& course, int n, int& clock) {
  CourseConfig config;
  config.seed = 11;
  const auto r = roster("c1", n);
  const auto round = course.create_round(config, r, at(++clock));
  for (const auto& e : r) course.submit_assignment(round, e.id, "doc-" + e.id.value, at(++clock));
  course.record_intro(round, r[0].id, "Hi, I study rivers.", at(++clock));
  course.advance_phase(round, Phase::Reviewing, at(++clock));
  for (const auto& t : course.tasks_in_round(round)) {
    course.submit_review(t.id, t.reviewer, full_prompts(), 70 + static_cast<int>(t.id.value.size() % 20),
                         at(++clock));
  }
  course.advance_phase(round, Phase::Rating, at(++clock));
  int stars = 0;
  for (const auto& [id, review] : course.state().reviews) {
    const auto& task = course.task_of(id);
    if (task.round != round) continue;
    course.post_message(id, task.author, "Could you say more about prompt 2?", at(++clock));
    course.post_message(id, task.reviewer, "Sure, add a diagram.", at(++clock));
    course.rate_feedback(id, task.author, 1 + (stars++ % 5), at(++clock));
  }
  course.advance_phase(round, Phase::Released, at(++clock));
  return round;
}

Event message_event(std::uint64_t seq) {
  return Event{seq, at(static_cast<int>(seq)), EventKind::IntroRecorded,
               {{"participant", "c1-p1"}, {"round_id", "c1-r1"}, {"intro", "x"}}};
}

}  // namespace

TEST_CASE("record encoding carries a CRC32 over the body") {
  const Event e{1, at(1), EventKind::SubmissionMade,
                {{"round_id", "c1-r1"}, {"author", "c1-p1"}, {"content_ref", "é ü"}}};
  const auto line = store::encode_record(e);
  CHECK(line.find('\n') == std::string::npos);

  // Independent recomputation with Boost's CRC-32 over the record sans crc32.
  auto j = nlohmann::json::parse(line);
  const auto stored = j["crc32"].get<std::string>();
  CHECK(stored.size() == 8);
  j.erase("crc32");
  const auto body = j.dump();
  boost::crc_32_type crc;
  crc.process_bytes(body.data(), body.size());
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08x", crc.checksum());
  CHECK(stored == hex);

  CHECK(store::decode_record(line) == e);

  // The standard CRC-32 check value.
  CHECK(store::crc32("123456789") == 0xCBF43926u);

  auto tampered = line;
  tampered[tampered.find("c1-p1") + 4] = '2';
  CHECK_THROWS_AS(store::decode_record(tampered), Error);
  CHECK_THROWS_AS(store::decode_record("{\"seq\":1"), Error);
}

TEST_CASE("append assigns consecutive sequences and rejects stale ones") {
  TempDir dir;
  auto log = store::EventLog::open(dir.path / "events.log", store::Durability::Fsync);
  CHECK(log.last_sequence() == 0);
  CHECK(log.append(message_event(1)) == 1);
  try {
    log.append(message_event(1));
    FAIL("expected SequenceConflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SequenceConflict);
  }
  CHECK_THROWS_AS(log.append(message_event(3)), Error);
  CHECK(log.append(message_event(2)) == 2);

  // Reopening resumes after the last record.
  auto reopened = store::EventLog::open(dir.path / "events.log");
  CHECK(reopened.last_sequence() == 2);
}

TEST_CASE("empty or missing log replays to an empty course") {
  TempDir dir;
  const auto missing = store::replay_log("c1", dir.path / "none.log");
  CHECK(missing.state() == CourseState{});
  spit(dir.path / "empty.log", "");
  CHECK(store::replay_log("c1", dir.path / "empty.log").state() == CourseState{});
}

TEST_CASE("a full round replays to the same state") {
  TempDir dir;
  const auto path = dir.path / "events.log";
  RoundId round;
  CourseState live;
  {
    LoggedCourse lc(path);
    int clock = 0;
    round = full_round(lc.course, 6, clock);
    live = lc.course.state();
  }
  const auto replayed = store::replay_log("c1", path);
  CHECK(replayed.state() == live);
  CHECK(replayed.round(round).phase == Phase::Released);
  CHECK(replayed.grades_visible(round, pid("c1", 1)));
}

TEST_CASE("10,000 appended events replay to the live state") {
  TempDir dir;
  const auto path = dir.path / "events.log";
  CourseState live;
  {
    LoggedCourse lc(path);
    int clock = 0;
    const auto round = full_round(lc.course, 5, clock);
    const auto any_review = lc.course.state().reviews.begin()->first;
    const auto& task = lc.course.task_of(any_review);
    while (lc.course.state().last_sequence < 10'000) {
      const bool author = lc.course.state().last_sequence % 2 == 0;
      lc.course.post_message(any_review, author ? task.author : task.reviewer,
                             "note " + std::to_string(lc.course.state().last_sequence), at(++clock));
    }
    CHECK(lc.log.last_sequence() == 10'000);
    CHECK(lc.course.round(round).phase == Phase::Released);
    live = lc.course.state();
  }
  const auto contents = store::read_log(path);
  CHECK_FALSE(contents.corruption.has_value());
  CHECK(contents.events.size() == 10'000);
  CHECK(store::replay("c1", contents.events).state() == live);
  CHECK(store::replay_log("c1", path).state() == live);
}

TEST_CASE("torn final record") {
  TempDir dir;
  const auto path = dir.path / "events.log";
  CourseState live;
  {
    LoggedCourse lc(path);
    int clock = 0;
    full_round(lc.course, 4, clock);
    live = lc.course.state();
  }
  const auto n = live.last_sequence;
  const auto bytes = slurp(path);

  SUBCASE("half a record") {
    const auto last_start = bytes.rfind('\n', bytes.size() - 2) + 1;
    spit(path, bytes.substr(0, last_start + (bytes.size() - last_start) / 2));
    try {
      (void)store::replay_log("c1", path);
      FAIL("expected CorruptLogError");
    } catch (const CorruptLogError& e) {
      CHECK(e.code() == ErrorCode::CorruptLog);
      CHECK(e.last_good_sequence() == n - 1);
    }
    const auto rec = store::recover("c1", path);
    REQUIRE(rec.corruption.has_value());
    CHECK(rec.corruption->last_good_sequence == n - 1);
    CHECK(rec.course.state().last_sequence == n - 1);
  }

  SUBCASE("complete record missing its newline") {
    spit(path, bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(store::replay_log("c1", path), CorruptLogError);
    CHECK(store::recover("c1", path).course.state().last_sequence == n - 1);
  }

  SUBCASE("flipped byte mid-log") {
    auto damaged = bytes;
    const auto mid = damaged.size() / 2;
    damaged[mid] = damaged[mid] == 'a' ? 'b' : 'a';
    spit(path, damaged);
    const auto rec = store::recover("c1", path);
    REQUIRE(rec.corruption.has_value());
    CHECK(rec.course.state().last_sequence == rec.corruption->last_good_sequence);
    CHECK(rec.corruption->last_good_sequence < n);
  }

  SUBCASE("repair truncates to the intact prefix and appends resume") {
    spit(path, bytes.substr(0, bytes.size() - 10));
    CHECK_THROWS_AS(store::EventLog::open(path), CorruptLogError);
    auto log = store::EventLog::open(path, store::Durability::Flush, store::EventLog::OpenMode::Repair);
    CHECK(log.last_sequence() == n - 1);
    CHECK(fs::file_size(path) == bytes.rfind('\n', bytes.size() - 2) + 1);
  }
}

TEST_CASE("truncation at every byte offset recovers the complete prefix") {
  TempDir dir;
  const auto path = dir.path / "events.log";
  std::vector<CourseState> states;  // states[s] = state after s events
  {
    LoggedCourse lc(path);
    int clock = 0;
    states.push_back(lc.course.state());
    CourseConfig config;
    config.k = 2;
    const auto r = roster("c1", 3);
    const auto round = lc.course.create_round(config, r, at(++clock));
    states.push_back(lc.course.state());
    for (const auto& e : r) {
      lc.course.submit_assignment(round, e.id, "doc", at(++clock));
      states.push_back(lc.course.state());
    }
  }
  const auto bytes = slurp(path);
  std::vector<std::size_t> line_ends;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] == '\n') line_ends.push_back(i + 1);
  }
  REQUIRE(line_ends.size() == states.size() - 1);

  const auto truncated = dir.path / "truncated.log";
  int mismatches = 0;
  for (std::size_t cut = 0; cut <= bytes.size(); ++cut) {
    spit(truncated, bytes.substr(0, cut));
    const auto complete = static_cast<std::size_t>(
        std::upper_bound(line_ends.begin(), line_ends.end(), cut) - line_ends.begin());
    const auto rec = store::recover("c1", truncated);
    if (rec.course.state() != states[complete]) ++mismatches;
    const bool torn = cut != 0 && (complete == 0 || line_ends[complete - 1] != cut);
    if (rec.corruption.has_value() != torn) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("snapshots") {
  TempDir dir;
  const auto path = dir.path / "events.log";
  const auto snap_path = dir.path / "snapshot.json";
  std::optional<store::Snapshot> at_500;
  CourseState live;
  {
    LoggedCourse lc(path);
    int clock = 0;
    full_round(lc.course, 5, clock);
    const auto review = lc.course.state().reviews.begin()->first;
    const auto& task = lc.course.task_of(review);
    while (lc.course.state().last_sequence < 600) {
      if (lc.course.state().last_sequence == 500) at_500 = store::snapshot(lc.course);
      lc.course.post_message(review, task.author, "ping", at(++clock));
    }
    live = lc.course.state();
  }
  REQUIRE(at_500.has_value());
  CHECK(at_500->covering_seq == 500);

  SUBCASE("file round trip") {
    store::save_snapshot(snap_path, *at_500);
    CHECK_FALSE(fs::exists(snap_path.string() + ".tmp"));
    CHECK(store::read_snapshot(snap_path) == *at_500);
    const auto j = nlohmann::json::parse(slurp(snap_path));
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("covering_seq") == 500);
    CHECK(j.at("course_id") == "c1");
  }

  SUBCASE("snapshot plus tail equals pure replay") {
    const auto from_snapshot = store::replay_log("c1", path, at_500);
    const auto pure = store::replay_log("c1", path);
    CHECK(from_snapshot.state() == pure.state());
    CHECK(pure.state() == live);
  }

  SUBCASE("newer schema is refused") {
    auto j = store::snapshot_to_json(*at_500);
    j["schema_version"] = store::kSnapshotSchemaVersion + 1;
    try {
      (void)store::snapshot_from_json(j);
      FAIL("expected VersionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::VersionMismatch);
    }
    auto bumped = *at_500;
    bumped.schema_version = 2;
    CHECK_THROWS_AS(store::load_snapshot(bumped), Error);
  }

  SUBCASE("snapshot of another course is refused") {
    auto other = *at_500;
    other.course_id = "c9";
    CHECK_THROWS_AS(store::replay_log("c1", path, other), Error);
  }
}
