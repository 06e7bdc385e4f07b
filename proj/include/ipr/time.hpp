#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace ipr {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Formats as RFC 3339 UTC with millisecond precision, e.g.
/// "2024-03-01T09:30:00.250Z".
std::string format_rfc3339(Timestamp ts);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff]Z" or a numeric "+HH:MM"/"-HH:MM" offset.
/// Throws Error(InvalidArgument) on malformed input.
Timestamp parse_rfc3339(std::string_view text);

Timestamp now_utc();

}  // namespace ipr
