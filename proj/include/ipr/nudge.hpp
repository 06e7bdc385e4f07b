#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "ipr/types.hpp"

namespace ipr {

inline constexpr std::string_view kActionabilityNudge =
    "Quick check: Is your feedback actionable?";

std::size_t word_count(std::string_view text) noexcept;

/// Returns the nudge text when `text` has fewer than `threshold` words.
std::optional<std::string> actionability_nudge(
    std::string_view text, int threshold = kDefaultNudgeThreshold);

}  // namespace ipr
