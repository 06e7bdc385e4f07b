#include "ipr/store/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <boost/crc.hpp>

#include "ipr/error.hpp"

namespace ipr::store {

namespace {

std::string hex32(std::uint32_t value) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", value);
  return buf;
}

[[noreturn]] void storage_failure(const std::string& what) {
  throw Error(ErrorCode::StorageFailure, what + ": " + std::strerror(errno));
}

}  // namespace

std::uint32_t crc32(std::string_view bytes) noexcept {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::string encode_record(const Event& event) {
  auto body = event_body(event);
  const auto checksum = hex32(crc32(body.dump()));
  body["crc32"] = checksum;
  return body.dump();
}

Event decode_record(std::string_view line) {
  auto record = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!record.is_object() || !record.contains("crc32") || !record["crc32"].is_string()) {
    throw Error(ErrorCode::CorruptLog, "record is not a checksummed JSON object");
  }
  const auto stored = record["crc32"].get<std::string>();
  record.erase("crc32");
  if (hex32(crc32(record.dump())) != stored) {
    throw Error(ErrorCode::CorruptLog, "checksum mismatch");
  }
  try {
    return event_from_body(record);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptLog, std::string("malformed record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptLog, std::string("malformed record: ") + e.what());
  }
}

LogContents read_log(const std::filesystem::path& path) {
  LogContents out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  std::uint64_t last = 0;
  while (pos < data.size()) {
    const auto newline = data.find('\n', pos);
    if (newline == std::string::npos) {
      out.corruption = LogCorruption{last, pos, "torn final record"};
      break;
    }
    try {
      auto event = decode_record(std::string_view(data).substr(pos, newline - pos));
      if (event.sequence != last + 1) {
        out.corruption = LogCorruption{last, pos, "sequence gap"};
        break;
      }
      last = event.sequence;
      out.events.push_back(std::move(event));
    } catch (const Error& e) {
      out.corruption = LogCorruption{last, pos, e.what()};
      break;
    }
    pos = newline + 1;
  }
  out.good_bytes = out.corruption ? out.corruption->byte_offset : data.size();
  return out;
}

EventLog EventLog::open(const std::filesystem::path& path, Durability durability, OpenMode mode) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const auto contents = read_log(path);
  if (contents.corruption) {
    if (mode == OpenMode::Strict) {
      throw CorruptLogError(contents.corruption->last_good_sequence,
                            "corrupt log " + path.string() + ": " + contents.corruption->reason);
    }
    std::error_code ec;
    std::filesystem::resize_file(path, contents.good_bytes, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot truncate " + path.string());
  }
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) storage_failure("cannot open " + path.string());
  const std::uint64_t last = contents.events.empty() ? 0 : contents.events.back().sequence;
  return EventLog(path, fd, durability, last);
}

EventLog::EventLog(std::filesystem::path path, int fd, Durability durability, std::uint64_t last)
    : path_(std::move(path)), fd_(fd), durability_(durability), last_sequence_(last) {}

EventLog::EventLog(EventLog&& other) noexcept
    : path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)),
      durability_(other.durability_),
      last_sequence_(other.last_sequence_) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    durability_ = other.durability_;
    last_sequence_ = other.last_sequence_;
  }
  return *this;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t EventLog::append(const Event& event) {
  if (event.sequence != last_sequence_ + 1) {
    throw Error(ErrorCode::SequenceConflict,
                "log " + path_.string() + " expects sequence " +
                    std::to_string(last_sequence_ + 1) + ", got " + std::to_string(event.sequence));
  }
  if (fd_ < 0) throw Error(ErrorCode::StorageFailure, "log is closed");
  const auto line = encode_record(event) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_failure("write to " + path_.string() + " failed");
    }
    written += static_cast<std::size_t>(n);
  }
  if (durability_ == Durability::Fsync && ::fsync(fd_) != 0) {
    storage_failure("fsync of " + path_.string() + " failed");
  }
  last_sequence_ = event.sequence;
  return last_sequence_;
}

}  // namespace ipr::store
