#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipr/types.hpp"

namespace ipr::sim {

/// Indexed by Condition.
using PerCondition = std::array<double, 3>;

struct AgentProfile {
  double quality = 0.5;    // latent quality q in [0, 1]
  double diligence = 1.0;  // chance of finishing each review task
  PerCondition message_propensity{0.2, 0.4, 0.4};
  double rating_noise_sd = 0.0;
  /// After each release q moves this fraction of the way toward the
  /// (normalized) mean usefulness of the reviews received, when that is
  /// higher than q.
  double learning_rate = 0.0;

  friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

/// How a cohort's profiles are produced: either an explicit list, or a
/// distribution for quality with shared behavioral parameters.
struct AgentSpec {
  std::vector<AgentProfile> agents;  // explicit list, used as-is when non-empty

  enum class QualityLaw { Uniform, Normal, Even };
  QualityLaw law = QualityLaw::Uniform;
  double a = 0.0;  // uniform: low, normal: mean
  double b = 1.0;  // uniform: high, normal: sd
  AgentProfile shared;  // every field but quality
};

/// Parses an agents document. Throws Error(ConfigInvalid).
///
///   {"agents": [{"quality": 0.8, "diligence": 1, "rating_noise_sd": 0.3,
///                "message_propensity": {"blind-random": 0.1, ...},
///                "learning_rate": 0}, ...]}
///   {"distribution": {"quality": {"uniform": [0, 1]} | {"normal": [0.5, 0.2]}
///                                | "even",
///                     "diligence": ..., "rating_noise_sd": ...,
///                     "message_propensity": {...}, "learning_rate": ...}}
AgentSpec parse_agent_spec(const nlohmann::json& j);
AgentSpec load_agent_spec(const std::filesystem::path& path);

void validate(const AgentProfile& p);

/// Draws `cohort` profiles. Explicit lists must have exactly `cohort`
/// entries. Quality draws depend only on `seed`, so every condition run
/// with the same seed sees the same cohort.
std::vector<AgentProfile> make_cohort(const AgentSpec& spec, int cohort, std::uint64_t seed);

}  // namespace ipr::sim
