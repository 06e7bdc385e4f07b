#include "ipr/error.hpp"

namespace ipr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::InsufficientSubmissions: return "InsufficientSubmissions";
    case ErrorCode::IncompleteReviews: return "IncompleteReviews";
    case ErrorCode::PhaseClosed: return "PhaseClosed";
    case ErrorCode::UnknownParticipant: return "UnknownParticipant";
    case ErrorCode::BlindModeActive: return "BlindModeActive";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::NotYourTask: return "NotYourTask";
    case ErrorCode::AllPromptsEmpty: return "AllPromptsEmpty";
    case ErrorCode::GradeOutOfRange: return "GradeOutOfRange";
    case ErrorCode::AlreadyReviewed: return "AlreadyReviewed";
    case ErrorCode::AlreadyRated: return "AlreadyRated";
    case ErrorCode::NotReceiver: return "NotReceiver";
    case ErrorCode::StarsOutOfRange: return "StarsOutOfRange";
    case ErrorCode::NotAParty: return "NotAParty";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::GradesPending: return "GradesPending";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewSubmitters: return "TooFewSubmitters";
    case ErrorCode::SequenceConflict: return "SequenceConflict";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::GradesNotReleased: return "GradesNotReleased";
  }
  return "Unknown";
}

}  // namespace ipr
