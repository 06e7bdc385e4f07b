#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipr/event.hpp"

namespace ipr::store {

/// Fsync makes each append durable before it returns; Flush only hands the
/// bytes to the kernel (tests, simulations).
enum class Durability { Flush, Fsync };

/// One JSON object per line: {"crc32","kind","payload","seq","ts"}. The
/// checksum covers the compact dump of the object without its crc32 field.
std::string encode_record(const Event& event);

/// Throws Error(CorruptLog) on malformed JSON or checksum mismatch.
Event decode_record(std::string_view line);

std::uint32_t crc32(std::string_view bytes) noexcept;

struct LogCorruption {
  std::uint64_t last_good_sequence = 0;
  std::uint64_t byte_offset = 0;  // start of the first bad record
  std::string reason;
};

struct LogContents {
  std::vector<Event> events;
  std::optional<LogCorruption> corruption;
  std::uint64_t good_bytes = 0;  // length of the intact prefix
};

/// Reads every intact record. Reading stops at the first torn, corrupt or
/// out-of-sequence record, which is reported in `corruption`. A missing
/// file reads as empty.
LogContents read_log(const std::filesystem::path& path);

/// Append-only writer for one course log. Single appender per file.
class EventLog {
 public:
  enum class OpenMode { Strict, Repair };

  /// Strict throws CorruptLogError if the existing log has a bad tail;
  /// Repair truncates the file to its intact prefix instead.
  static EventLog open(const std::filesystem::path& path,
                       Durability durability = Durability::Fsync,
                       OpenMode mode = OpenMode::Strict);

  EventLog(EventLog&& other) noexcept;
  EventLog& operator=(EventLog&& other) noexcept;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  ~EventLog();

  /// Throws Error(SequenceConflict) unless event.sequence follows the last
  /// appended one, Error(StorageFailure) if the write does not complete.
  std::uint64_t append(const Event& event);

  std::uint64_t last_sequence() const noexcept { return last_sequence_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  EventLog(std::filesystem::path path, int fd, Durability durability, std::uint64_t last);

  std::filesystem::path path_;
  int fd_ = -1;
  Durability durability_ = Durability::Fsync;
  std::uint64_t last_sequence_ = 0;
};

}  // namespace ipr::store
