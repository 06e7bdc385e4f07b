#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ipr/ids.hpp"

namespace ipr {

enum class MatchingPolicy { Random, Incentive };

std::string_view to_string(MatchingPolicy p) noexcept;
MatchingPolicy parse_matching_policy(std::string_view text);

inline constexpr double kDefaultUsefulness = 3.0;

struct UsefulnessScore {
  ParticipantId participant;
  double value = kDefaultUsefulness;
  int n_ratings = 0;
};

/// Mean of all stars the participant's reviews received in earlier rounds,
/// or 3.0 with no history. Stars outside 1..5 are rejected.
UsefulnessScore usefulness_score(const ParticipantId& participant,
                                 std::span<const int> stars);

struct ReviewPair {
  ParticipantId reviewer;
  ParticipantId author;

  friend auto operator<=>(const ReviewPair&, const ReviewPair&) = default;
  friend bool operator==(const ReviewPair&, const ReviewPair&) = default;
};

struct AssignmentSet {
  std::string round;
  std::vector<ReviewPair> pairs;  // construction order
  MatchingPolicy policy = MatchingPolicy::Random;
  std::uint64_t seed = 0;

  friend bool operator==(const AssignmentSet&, const AssignmentSet&) = default;
};

using ScoreMap = std::map<ParticipantId, double>;

constexpr int effective_fan_out(int k, std::size_t n) noexcept {
  if (n < 2 || k < 1) return 0;
  const auto cap = static_cast<int>(n - 1);
  return k < cap ? k : cap;
}

/// Orders the submitters, then lets the participant at ring position j be
/// reviewed by positions j+1 .. j+d (mod ring size), d = min(k, n-1).
///
/// Random: one ring over a seeded uniform permutation.
/// Incentive: submitters sorted by descending score (ties by a seeded hash
/// of the id), cut into consecutive rank blocks of at least d+1 members, one
/// ring per block. Block sizes differ by at most one. With n < 2(d+1) there
/// is a single block, so the ring covers everyone.
///
/// Participants missing from `scores` count as kDefaultUsefulness.
/// Throws Error(TooFewSubmitters) when n < 2 and Error(InvalidArgument) when
/// k < 1 or ids repeat.
AssignmentSet assign_reviewers(std::span<const ParticipantId> submitters,
                               MatchingPolicy policy, int k,
                               const ScoreMap& scores, std::uint64_t seed,
                               std::string round = {});

/// The ring layout used by assign_reviewers: blocks of consecutive ranks.
/// Exposed for tests of the wrap-around structure.
std::vector<std::vector<ParticipantId>> matching_blocks(
    std::span<const ParticipantId> submitters, MatchingPolicy policy, int k,
    const ScoreMap& scores, std::uint64_t seed);

enum class ViolationKind { SelfPair, DuplicatePair, OutDegree, InDegree, UnknownEndpoint };

std::string_view to_string(ViolationKind v) noexcept;

struct Violation {
  ViolationKind kind;
  ParticipantId participant;
  std::string detail;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const noexcept;
};

ValidityReport validate_assignment(const AssignmentSet& set,
                                   std::span<const ParticipantId> submitters,
                                   int k);

struct Assortativity {
  double value = 0.0;
  bool degenerate = false;
};

/// Spearman correlation, over authors, between an author's score and the
/// mean score of that author's reviewers. Returns 0 flagged degenerate when
/// either side has no rank variation.
Assortativity assortativity(const AssignmentSet& set, const ScoreMap& scores);

/// Stable 64-bit mixing used for seeded tie-breaks and derived seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view salt) noexcept;
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace ipr
