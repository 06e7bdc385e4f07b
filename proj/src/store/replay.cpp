#include "ipr/error.hpp"
#include "ipr/store/snapshot.hpp"

namespace ipr::store {

namespace {

Course start_from(const std::string& course_id, const std::optional<Snapshot>& from) {
  if (!from) return Course(course_id);
  if (from->course_id != course_id) {
    throw Error(ErrorCode::InvalidArgument, "snapshot belongs to course " + from->course_id);
  }
  return load_snapshot(*from);
}

void fold(Course& course, std::span<const Event> events) {
  for (const auto& e : events) {
    if (e.sequence <= course.state().last_sequence) continue;
    course.apply(e);
  }
}

}  // namespace

Course replay(const std::string& course_id, std::span<const Event> events) {
  Course course(course_id);
  for (const auto& e : events) course.apply(e);
  return course;
}

Course replay_log(const std::string& course_id, const std::filesystem::path& log,
                  const std::optional<Snapshot>& from) {
  const auto contents = read_log(log);
  if (contents.corruption) {
    throw CorruptLogError(contents.corruption->last_good_sequence,
                          "corrupt record after sequence " +
                              std::to_string(contents.corruption->last_good_sequence) + ": " +
                              contents.corruption->reason);
  }
  auto course = start_from(course_id, from);
  fold(course, contents.events);
  return course;
}

Recovery recover(const std::string& course_id, const std::filesystem::path& log,
                 const std::optional<Snapshot>& from) {
  const auto contents = read_log(log);
  auto course = start_from(course_id, from);
  fold(course, contents.events);
  return {std::move(course), contents.corruption};
}

}  // namespace ipr::store
