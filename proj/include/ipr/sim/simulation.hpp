#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipr/sim/agents.hpp"
#include "ipr/types.hpp"

namespace ipr::sim {

struct SimConfig {
  int cohort = 30;
  int rounds = 1;
  Condition condition = Condition::IdentifiedIncentive;
  std::uint64_t seed = 0;
  int k = kDefaultFanOut;
  GradeScale scale;
  AgentSpec agents;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 when n < 2
  std::size_t n = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

struct RoundMetrics {
  int round = 0;
  Condition condition = Condition::IdentifiedIncentive;
  std::size_t cohort = 0;
  int fan_out = 0;
  std::size_t tasks_delivered = 0;
  std::size_t reviews_written = 0;
  std::size_t ratings = 0;
  Summary usefulness;    // stars received by reviews written this round
  Summary review_words;  // total words per written review
  std::size_t nudged_reviews = 0;
  std::size_t messages = 0;
  std::size_t threads_with_messages = 0;
  double assortativity = 0.0;
  bool assortativity_degenerate = false;
  bool released = false;
  /// Lower-median grade per participant that received at least one review.
  std::vector<std::pair<ParticipantId, int>> grades;

  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

/// Runs every round through the full Course workflow (submit, match,
/// review, rate, release). Deterministic in config. Throws
/// Error(ConfigInvalid) for cohort < 2, rounds < 1 or bad agents.
std::vector<RoundMetrics> run_simulation(const SimConfig& config);

/// p90 - p10 (nearest rank) of the round's aggregate grades. Throws
/// Error(GradesNotReleased) before release and Error(TooFewSamples) with
/// no grades.
double grade_gap(const RoundMetrics& metrics);

}  // namespace ipr::sim
