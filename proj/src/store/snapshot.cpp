#include "ipr/store/snapshot.hpp"

#include <fstream>

#include "ipr/error.hpp"
#include "ipr/serialize.hpp"

namespace ipr::store {

Snapshot snapshot(const Course& course) {
  return {kSnapshotSchemaVersion, course.id(), course.state().last_sequence, course.state()};
}

Course load_snapshot(const Snapshot& snap) {
  if (snap.schema_version != kSnapshotSchemaVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "snapshot schema " + std::to_string(snap.schema_version) + " is not supported (expected " +
                    std::to_string(kSnapshotSchemaVersion) + ")");
  }
  if (snap.state.last_sequence != snap.covering_seq) {
    throw Error(ErrorCode::CorruptLog, "snapshot covering_seq disagrees with its state");
  }
  return Course(snap.course_id, snap.state);
}

nlohmann::json snapshot_to_json(const Snapshot& snap) {
  return {{"schema_version", snap.schema_version},
          {"course_id", snap.course_id},
          {"covering_seq", snap.covering_seq},
          {"state", snap.state}};
}

Snapshot snapshot_from_json(const nlohmann::json& j) {
  Snapshot snap;
  snap.schema_version = j.at("schema_version").get<int>();
  if (snap.schema_version != kSnapshotSchemaVersion) {
    // Newer layouts may not parse; report the version before touching state.
    throw Error(ErrorCode::VersionMismatch,
                "snapshot schema " + std::to_string(snap.schema_version) + " is not supported");
  }
  snap.course_id = j.at("course_id").get<std::string>();
  snap.covering_seq = j.at("covering_seq").get<std::uint64_t>();
  snap.state = j.at("state").get<CourseState>();
  return snap;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    out << snapshot_to_json(snap).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot rename snapshot: " + ec.message());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "no snapshot at " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::CorruptLog, "snapshot is not valid JSON");
  try {
    return snapshot_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptLog, std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace ipr::store
