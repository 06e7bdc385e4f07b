#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "ipr/course.hpp"
#include "ipr/store/event_log.hpp"

namespace ipr::store {

inline constexpr int kSnapshotSchemaVersion = 1;

struct Snapshot {
  int schema_version = kSnapshotSchemaVersion;
  std::string course_id;
  std::uint64_t covering_seq = 0;
  CourseState state;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

Snapshot snapshot(const Course& course);

/// Throws Error(VersionMismatch) for any schema version but the current one.
Course load_snapshot(const Snapshot& snap);

nlohmann::json snapshot_to_json(const Snapshot& snap);
Snapshot snapshot_from_json(const nlohmann::json& j);

/// Writes via a temporary file and rename so readers never see a partial
/// document.
void save_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Folds `events` into a fresh course. Throws whatever apply() throws.
Course replay(const std::string& course_id, std::span<const Event> events);

/// Strict replay of a log file, optionally starting from a snapshot (events
/// at or below its covering_seq are skipped). Throws CorruptLogError with
/// the last good sequence on a torn or corrupt record.
Course replay_log(const std::string& course_id, const std::filesystem::path& log,
                  const std::optional<Snapshot>& from = std::nullopt);

struct Recovery {
  Course course;
  std::optional<LogCorruption> corruption;
};

/// Like replay_log but keeps everything up to the last complete record.
Recovery recover(const std::string& course_id, const std::filesystem::path& log,
                 const std::optional<Snapshot>& from = std::nullopt);

}  // namespace ipr::store
