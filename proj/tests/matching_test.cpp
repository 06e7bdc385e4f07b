#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "ipr/error.hpp"
#include "ipr/matching.hpp"

using namespace ipr;

namespace {

std::vector<ParticipantId> people(int n) {
  std::vector<ParticipantId> out;
  for (int i = 0; i < n; ++i) out.push_back(ParticipantId{"s" + std::to_string(i)});
  return out;
}

ScoreMap random_scores(const std::vector<ParticipantId>& ids, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0, 5.0);
  ScoreMap scores;
  for (const auto& p : ids) scores[p] = u(rng);
  return scores;
}

// Independent checker over adjacency lists; does not share code with
// validate_assignment.
bool brute_force_valid(const AssignmentSet& set, const std::vector<ParticipantId>& ids, int k) {
  const int n = static_cast<int>(ids.size());
  const int d = std::min(k, n - 1);
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < n; ++i) index[ids[i].value] = i;
  std::vector<std::vector<int>> out(n);
  std::vector<int> in(n, 0);
  for (const auto& p : set.pairs) {
    auto r = index.find(p.reviewer.value);
    auto a = index.find(p.author.value);
    if (r == index.end() || a == index.end() || r->second == a->second) return false;
    out[r->second].push_back(a->second);
    ++in[a->second];
  }
  for (int i = 0; i < n; ++i) {
    std::sort(out[i].begin(), out[i].end());
    if (std::adjacent_find(out[i].begin(), out[i].end()) != out[i].end()) return false;
    if (static_cast<int>(out[i].size()) != d || in[i] != d) return false;
  }
  return true;
}

std::set<ParticipantId> reviewers_of(const AssignmentSet& set, const ParticipantId& author) {
  std::set<ParticipantId> out;
  for (const auto& p : set.pairs) {
    if (p.author == author) out.insert(p.reviewer);
  }
  return out;
}

// Textbook Spearman for tie-free data.
double spearman_distinct(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rank = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      r[i] = 1.0 + static_cast<double>(std::count_if(v.begin(), v.end(), [&](double o) { return o < v[i]; }));
    }
    return r;
  };
  const auto rx = rank(x);
  const auto ry = rank(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("usefulness_score") {
  const ParticipantId p{"s0"};
  const std::vector<int> none;
  auto s = usefulness_score(p, none);
  CHECK(s.value == 3.0);
  CHECK(s.n_ratings == 0);

  const std::vector<int> mixed{5, 4, 3};
  s = usefulness_score(p, mixed);
  CHECK(s.value == doctest::Approx(4.0));
  CHECK(s.n_ratings == 3);

  const std::vector<int> ones(6, 1);
  s = usefulness_score(p, ones);
  CHECK(s.value == 1.0);
  CHECK(s.n_ratings == 6);

  const std::vector<int> bad{0};
  CHECK_THROWS_AS(usefulness_score(p, bad), Error);
}

TEST_CASE("n=4, k=3 forces the complete digraph") {
  const auto ids = people(4);
  for (auto policy : {MatchingPolicy::Random, MatchingPolicy::Incentive}) {
    const auto set = assign_reviewers(ids, policy, 3, {}, 99);
    CHECK(set.pairs.size() == 12);
    std::set<ReviewPair> expected;
    for (const auto& a : ids) {
      for (const auto& b : ids) {
        if (a != b) expected.insert({a, b});
      }
    }
    CHECK(std::set<ReviewPair>(set.pairs.begin(), set.pairs.end()) == expected);
  }
}

TEST_CASE("n=5 incentive ring follows the score order") {
  const std::vector<ParticipantId> ids{{"A"}, {"B"}, {"C"}, {"D"}, {"E"}};
  const ScoreMap scores{{{"A"}, 5.0}, {{"B"}, 4.5}, {{"C"}, 4.0}, {{"D"}, 3.0}, {{"E"}, 1.5}};
  // Hand expansion: position j is reviewed by j+1..j+3 mod 5 over A,B,C,D,E.
  const auto set = assign_reviewers(ids, MatchingPolicy::Incentive, 3, scores, 1234);
  CHECK(reviewers_of(set, {"A"}) == std::set<ParticipantId>{{"B"}, {"C"}, {"D"}});
  CHECK(reviewers_of(set, {"B"}) == std::set<ParticipantId>{{"C"}, {"D"}, {"E"}});
  CHECK(reviewers_of(set, {"C"}) == std::set<ParticipantId>{{"D"}, {"E"}, {"A"}});
  CHECK(reviewers_of(set, {"D"}) == std::set<ParticipantId>{{"E"}, {"A"}, {"B"}});
  CHECK(reviewers_of(set, {"E"}) == std::set<ParticipantId>{{"A"}, {"B"}, {"C"}});
  CHECK(brute_force_valid(set, ids, 3));
}

TEST_CASE("too few submitters") {
  const auto one = people(1);
  try {
    (void)assign_reviewers(one, MatchingPolicy::Random, 3, {}, 1);
    FAIL("expected TooFewSubmitters");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSubmitters);
  }
  const auto two = people(2);
  CHECK_THROWS_AS(assign_reviewers(two, MatchingPolicy::Random, 0, {}, 1), Error);
  const std::vector<ParticipantId> dup{{"x"}, {"x"}};
  CHECK_THROWS_AS(assign_reviewers(dup, MatchingPolicy::Random, 1, {}, 1), Error);
}

TEST_CASE("validate_assignment flags broken sets") {
  const auto ids = people(4);
  auto set = assign_reviewers(ids, MatchingPolicy::Random, 2, {}, 5);
  CHECK(validate_assignment(set, ids, 2).ok());

  SUBCASE("self pair") {
    set.pairs.push_back({ids[0], ids[0]});
    const auto report = validate_assignment(set, ids, 2);
    CHECK(report.count(ViolationKind::SelfPair) == 1);
  }
  SUBCASE("missing incoming pair") {
    const auto victim = set.pairs.back().author;
    set.pairs.pop_back();
    const auto report = validate_assignment(set, ids, 2);
    REQUIRE(report.count(ViolationKind::InDegree) == 1);
    CHECK(report.count(ViolationKind::OutDegree) == 1);
    const auto it = std::find_if(report.violations.begin(), report.violations.end(),
                                 [](const Violation& v) { return v.kind == ViolationKind::InDegree; });
    CHECK(it->participant == victim);
  }
  SUBCASE("duplicate and unknown endpoints") {
    set.pairs.push_back(set.pairs.front());
    set.pairs.push_back({ParticipantId{"ghost"}, ids[1]});
    const auto report = validate_assignment(set, ids, 2);
    CHECK(report.count(ViolationKind::DuplicatePair) == 1);
    CHECK(report.count(ViolationKind::UnknownEndpoint) == 1);
  }
}

TEST_CASE("assignments are valid for n in [2, 50], k = 3") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 50; ++n) {
    const auto ids = people(n);
    const auto scores = random_scores(ids, rng);
    for (auto policy : {MatchingPolicy::Random, MatchingPolicy::Incentive}) {
      const auto set = assign_reviewers(ids, policy, 3, scores, static_cast<std::uint64_t>(n));
      CHECK(validate_assignment(set, ids, 3).ok());
      CHECK(brute_force_valid(set, ids, 3));
    }
  }
}

TEST_CASE("validity by construction over n in [2, 500], k in [1, 6], seeds 0..20") {
  std::mt19937_64 rng(17);
  std::size_t failures = 0;
  for (int n = 2; n <= 500; ++n) {
    const auto ids = people(n);
    const auto scores = random_scores(ids, rng);
    for (int k = 1; k <= 6; ++k) {
      for (std::uint64_t seed = 0; seed <= 20; ++seed) {
        for (auto policy : {MatchingPolicy::Random, MatchingPolicy::Incentive}) {
          const auto set = assign_reviewers(ids, policy, k, scores, seed);
          if (!brute_force_valid(set, ids, k)) ++failures;
        }
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("assignments are deterministic") {
  std::mt19937_64 rng(8);
  const auto ids = people(37);
  const auto scores = random_scores(ids, rng);
  for (auto policy : {MatchingPolicy::Random, MatchingPolicy::Incentive}) {
    const auto a = assign_reviewers(ids, policy, 3, scores, 42, "r1");
    const auto b = assign_reviewers(ids, policy, 3, scores, 42, "r1");
    CHECK(a == b);
    const auto c = assign_reviewers(ids, policy, 3, scores, 43, "r1");
    if (policy == MatchingPolicy::Random) CHECK(a.pairs != c.pairs);
  }
}

TEST_CASE("random policy is neutral to input order") {
  const auto ids = people(6);
  auto reversed = ids;
  std::reverse(reversed.begin(), reversed.end());
  constexpr int kSeeds = 10000;
  // Each ordered pair appears in a 2-regular assignment of 6 people with
  // probability 12/30; counts are binomial(10000, 0.4).
  const double expected = kSeeds * 12.0 / 30.0;
  const double sigma = std::sqrt(kSeeds * 0.4 * 0.6);
  for (const auto* input : std::array<const std::vector<ParticipantId>*, 2>{&ids, &reversed}) {
    std::map<ReviewPair, int> freq;
    for (int seed = 0; seed < kSeeds; ++seed) {
      for (const auto& p : assign_reviewers(*input, MatchingPolicy::Random, 2, {}, seed).pairs) ++freq[p];
    }
    CHECK(freq.size() == 30);
    for (const auto& [pair, count] : freq) CHECK(std::fabs(count - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("incentive blocks") {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 120; ++n) {
    const auto ids = people(n);
    const auto scores = random_scores(ids, rng);
    for (int k = 1; k <= 4; ++k) {
      const int d = effective_fan_out(k, n);
      const auto blocks = matching_blocks(ids, MatchingPolicy::Incentive, k, scores, 1);
      std::size_t smallest = n;
      std::size_t largest = 0;
      std::vector<double> flat;
      for (const auto& b : blocks) {
        smallest = std::min(smallest, b.size());
        largest = std::max(largest, b.size());
        for (const auto& p : b) flat.push_back(scores.at(p));
      }
      CHECK(smallest >= static_cast<std::size_t>(d + 1));
      CHECK(largest - smallest <= 1);
      CHECK(std::is_sorted(flat.rbegin(), flat.rend()));
      if (n < 2 * (d + 1)) CHECK(blocks.size() == 1);
    }
  }
}

TEST_CASE("incentive reviewer quality is monotone outside the wrap positions") {
  std::mt19937_64 rng(5);
  for (int n : {6, 10, 17, 30, 64, 101}) {
    for (int k = 1; k <= 3; ++k) {
      const auto ids = people(n);
      const auto scores = random_scores(ids, rng);
      const int d = effective_fan_out(k, n);
      const auto set = assign_reviewers(ids, MatchingPolicy::Incentive, k, scores, 77);
      const auto blocks = matching_blocks(ids, MatchingPolicy::Incentive, k, scores, 77);

      std::vector<double> reviewer_means;  // in author rank order, wraps skipped
      for (const auto& block : blocks) {
        for (std::size_t j = 0; j + static_cast<std::size_t>(d) < block.size(); ++j) {
          double total = 0.0;
          for (const auto& r : reviewers_of(set, block[j])) total += scores.at(r);
          reviewer_means.push_back(total / d);
        }
      }
      CHECK(std::is_sorted(reviewer_means.rbegin(), reviewer_means.rend()));
    }
  }
}

TEST_CASE("incentive assignment depends only on score order") {
  std::mt19937_64 rng(6);
  const auto ids = people(40);
  auto scores = random_scores(ids, rng);
  // Add ties so the seeded tie-break is exercised too.
  scores[ids[3]] = scores[ids[4]] = scores[ids[5]] = 2.5;
  const auto base = assign_reviewers(ids, MatchingPolicy::Incentive, 3, scores, 9);
  ScoreMap affine;
  ScoreMap exponential;
  for (const auto& [p, s] : scores) {
    affine[p] = 2.0 * s + 7.0;
    exponential[p] = std::exp(s);
  }
  CHECK(assign_reviewers(ids, MatchingPolicy::Incentive, 3, affine, 9) == base);
  CHECK(assign_reviewers(ids, MatchingPolicy::Incentive, 3, exponential, 9) == base);
}

TEST_CASE("assortativity") {
  std::mt19937_64 rng(2025);
  const auto ids = people(30);

  SUBCASE("incentive is strongly assortative, random is not") {
    double min_incentive = 1.0;
    double random_total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto scores = random_scores(ids, rng);
      const auto inc = assign_reviewers(ids, MatchingPolicy::Incentive, 3, scores, seed);
      const auto rnd = assign_reviewers(ids, MatchingPolicy::Random, 3, scores, seed);
      const auto a = assortativity(inc, scores);
      CHECK_FALSE(a.degenerate);
      min_incentive = std::min(min_incentive, a.value);
      random_total += assortativity(rnd, scores).value;
    }
    CHECK(min_incentive >= 0.9);
    CHECK(std::fabs(random_total / 100.0) <= 0.2);
  }

  SUBCASE("matches the textbook formula on tie-free data") {
    const auto scores = random_scores(ids, rng);
    const auto set = assign_reviewers(ids, MatchingPolicy::Random, 3, scores, 4);
    std::vector<double> own;
    std::vector<double> theirs;
    for (const auto& a : ids) {
      own.push_back(scores.at(a));
      double total = 0.0;
      for (const auto& r : reviewers_of(set, a)) total += scores.at(r);
      theirs.push_back(total / 3.0);
    }
    CHECK(assortativity(set, scores).value == doctest::Approx(spearman_distinct(own, theirs)).epsilon(1e-12));
  }

  SUBCASE("identical scores are degenerate") {
    ScoreMap flat;
    for (const auto& p : ids) flat[p] = 3.0;
    const auto set = assign_reviewers(ids, MatchingPolicy::Incentive, 3, flat, 1);
    const auto a = assortativity(set, flat);
    CHECK(a.degenerate);
    CHECK(a.value == 0.0);
  }

  SUBCASE("missing scores are rejected") {
    const auto set = assign_reviewers(ids, MatchingPolicy::Random, 3, {}, 1);
    CHECK_THROWS_AS(assortativity(set, ScoreMap{}), Error);
  }
}
