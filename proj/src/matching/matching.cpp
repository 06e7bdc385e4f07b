#include "ipr/matching.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ipr/error.hpp"
#include "ipr/stats.hpp"

namespace ipr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Unbiased draw from [0, bound) by rejection; independent of the standard
// library's distribution implementations so results are portable.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double score_of(const ScoreMap& scores, const ParticipantId& p) {
  auto it = scores.find(p);
  return it == scores.end() ? kDefaultUsefulness : it->second;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view salt) noexcept {
  return splitmix64(seed ^ splitmix64(fnv1a(salt)));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return splitmix64(seed ^ splitmix64(salt + 0x632BE59BD9B4E019ull));
}

std::string_view to_string(MatchingPolicy p) noexcept {
  return p == MatchingPolicy::Random ? "RANDOM" : "INCENTIVE";
}

MatchingPolicy parse_matching_policy(std::string_view text) {
  if (text == "RANDOM") return MatchingPolicy::Random;
  if (text == "INCENTIVE") return MatchingPolicy::Incentive;
  throw Error(ErrorCode::InvalidArgument, "unknown matching policy: " + std::string(text));
}

std::string_view to_string(ViolationKind v) noexcept {
  switch (v) {
    case ViolationKind::SelfPair: return "self-pair";
    case ViolationKind::DuplicatePair: return "duplicate-pair";
    case ViolationKind::OutDegree: return "out-degree";
    case ViolationKind::InDegree: return "in-degree";
    case ViolationKind::UnknownEndpoint: return "unknown-endpoint";
  }
  return "?";
}

UsefulnessScore usefulness_score(const ParticipantId& participant, std::span<const int> stars) {
  UsefulnessScore score{participant, kDefaultUsefulness, 0};
  if (stars.empty()) return score;
  long total = 0;
  for (int s : stars) {
    if (s < 1 || s > 5) throw Error(ErrorCode::InvalidArgument, "stars outside 1..5");
    total += s;
  }
  score.n_ratings = static_cast<int>(stars.size());
  score.value = static_cast<double>(total) / static_cast<double>(stars.size());
  return score;
}

std::vector<std::vector<ParticipantId>> matching_blocks(std::span<const ParticipantId> submitters,
                                                        MatchingPolicy policy, int k,
                                                        const ScoreMap& scores,
                                                        std::uint64_t seed) {
  const std::size_t n = submitters.size();
  if (n < 2) throw Error(ErrorCode::TooFewSubmitters, "need at least two submitters");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (std::set<ParticipantId>(submitters.begin(), submitters.end()).size() != n) {
    throw Error(ErrorCode::InvalidArgument, "submitter ids repeat");
  }

  std::vector<ParticipantId> order(submitters.begin(), submitters.end());
  if (policy == MatchingPolicy::Random) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[uniform_below(rng, i + 1)]);
    }
    return {std::move(order)};
  }

  struct Keyed {
    double score;
    std::uint64_t tie;
    ParticipantId id;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(n);
  for (const auto& p : order) keyed.push_back({score_of(scores, p), mix_seed(seed, p.value), p});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.tie != b.tie) return a.tie < b.tie;
    return a.id < b.id;
  });

  const auto d = static_cast<std::size_t>(effective_fan_out(k, n));
  const std::size_t blocks = std::max<std::size_t>(1, n / (d + 1));
  const std::size_t base = n / blocks;
  const std::size_t extra = n % blocks;

  std::vector<std::vector<ParticipantId>> out(blocks);
  std::size_t next = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) out[b].push_back(std::move(keyed[next++].id));
  }
  return out;
}

AssignmentSet assign_reviewers(std::span<const ParticipantId> submitters, MatchingPolicy policy,
                               int k, const ScoreMap& scores, std::uint64_t seed,
                               std::string round) {
  const auto blocks = matching_blocks(submitters, policy, k, scores, seed);
  const auto d = static_cast<std::size_t>(effective_fan_out(k, submitters.size()));

  AssignmentSet set{std::move(round), {}, policy, seed};
  set.pairs.reserve(submitters.size() * d);
  for (const auto& block : blocks) {
    const std::size_t m = block.size();
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t s = 1; s <= d; ++s) set.pairs.push_back({block[(j + s) % m], block[j]});
    }
  }
  return set;
}

std::size_t ValidityReport::count(ViolationKind kind) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

ValidityReport validate_assignment(const AssignmentSet& set,
                                   std::span<const ParticipantId> submitters, int k) {
  ValidityReport report;
  const std::set<ParticipantId> members(submitters.begin(), submitters.end());
  const int d = effective_fan_out(k, members.size());

  std::set<ReviewPair> seen;
  std::map<ParticipantId, int> out_degree;
  std::map<ParticipantId, int> in_degree;
  for (const auto& pair : set.pairs) {
    if (pair.reviewer == pair.author) {
      report.violations.push_back({ViolationKind::SelfPair, pair.reviewer, "reviews themselves"});
    }
    if (!seen.insert(pair).second) {
      report.violations.push_back({ViolationKind::DuplicatePair, pair.reviewer,
                                   "reviews " + pair.author.value + " more than once"});
    }
    for (const auto* endpoint : {&pair.reviewer, &pair.author}) {
      if (!members.contains(*endpoint)) {
        report.violations.push_back({ViolationKind::UnknownEndpoint, *endpoint, "not a submitter"});
      }
    }
    ++out_degree[pair.reviewer];
    ++in_degree[pair.author];
  }
  for (const auto& p : members) {
    const int out = out_degree[p];
    const int in = in_degree[p];
    if (out != d) {
      report.violations.push_back({ViolationKind::OutDegree, p,
                                   "gives " + std::to_string(out) + " reviews, expected " +
                                       std::to_string(d)});
    }
    if (in != d) {
      report.violations.push_back({ViolationKind::InDegree, p,
                                   "receives " + std::to_string(in) + " reviews, expected " +
                                       std::to_string(d)});
    }
  }
  return report;
}

Assortativity assortativity(const AssignmentSet& set, const ScoreMap& scores) {
  std::map<ParticipantId, std::vector<ParticipantId>> reviewers_of;
  for (const auto& pair : set.pairs) reviewers_of[pair.author].push_back(pair.reviewer);

  auto lookup = [&](const ParticipantId& p) {
    auto it = scores.find(p);
    if (it == scores.end()) throw Error(ErrorCode::InvalidArgument, "no score for " + p.value);
    return it->second;
  };

  std::vector<double> own;
  std::vector<double> theirs;
  for (const auto& [author, reviewers] : reviewers_of) {
    own.push_back(lookup(author));
    double total = 0.0;
    for (const auto& r : reviewers) total += lookup(r);
    theirs.push_back(total / static_cast<double>(reviewers.size()));
  }
  const auto rho = stats::spearman(own, theirs);
  if (!rho) return {0.0, true};
  return {*rho, false};
}

}  // namespace ipr
