#pragma once

#include <compare>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

namespace ipr {

/// Opaque string identifier tagged by the kind of entity it names.
template <typename Tag>
struct Id {
  std::string value;

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;
};

template <typename Tag>
void to_json(nlohmann::json& j, const Id<Tag>& id) {
  j = id.value;
}

template <typename Tag>
void from_json(const nlohmann::json& j, Id<Tag>& id) {
  id.value = j.get<std::string>();
}

using ParticipantId = Id<struct ParticipantTag>;
using RoundId = Id<struct RoundTag>;
using TaskId = Id<struct TaskTag>;
using ReviewId = Id<struct ReviewTag>;

}  // namespace ipr
