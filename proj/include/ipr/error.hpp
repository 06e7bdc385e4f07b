#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipr {

enum class ErrorCode {
  // workflow
  IllegalTransition,
  InsufficientSubmissions,
  IncompleteReviews,
  PhaseClosed,
  UnknownParticipant,
  BlindModeActive,
  TooLong,
  NotYourTask,
  AllPromptsEmpty,
  GradeOutOfRange,
  AlreadyReviewed,
  AlreadyRated,
  NotReceiver,
  StarsOutOfRange,
  NotAParty,
  EmptyBody,
  GradesPending,
  NotFound,
  InvalidArgument,
  // matching
  TooFewSubmitters,
  // persistence
  SequenceConflict,
  StorageFailure,
  CorruptLog,
  VersionMismatch,
  // statistics and simulation
  TooFewSamples,
  ZeroVariance,
  ConfigInvalid,
  IoFailure,
  GradesNotReleased,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by strict replay when a record fails its checksum or is torn.
class CorruptLogError : public Error {
 public:
  CorruptLogError(std::uint64_t last_good_sequence, const std::string& message)
      : Error(ErrorCode::CorruptLog, message),
        last_good_sequence_(last_good_sequence) {}

  std::uint64_t last_good_sequence() const noexcept {
    return last_good_sequence_;
  }

 private:
  std::uint64_t last_good_sequence_;
};

}  // namespace ipr
