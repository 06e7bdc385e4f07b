#include "ipr/nudge.hpp"

#include <cctype>

namespace ipr {

std::size_t word_count(std::string_view text) noexcept {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

std::optional<std::string> actionability_nudge(std::string_view text, int threshold) {
  if (threshold > 0 && word_count(text) < static_cast<std::size_t>(threshold)) {
    return std::string(kActionabilityNudge);
  }
  return std::nullopt;
}

}  // namespace ipr
