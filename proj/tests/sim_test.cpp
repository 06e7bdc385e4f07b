#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ipr/error.hpp"
#include "ipr/sim/agents.hpp"
#include "ipr/sim/csv.hpp"
#include "ipr/sim/simulation.hpp"

using namespace ipr;
using namespace ipr::sim;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ipr::Error");
  return ErrorCode::InvalidArgument;
}

SimConfig config(int cohort, int rounds, Condition condition, std::uint64_t seed) {
  SimConfig c;
  c.cohort = cohort;
  c.rounds = rounds;
  c.condition = condition;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("agent files") {
  const auto list = parse_agent_spec(json::parse(R"({"agents": [
      {"quality": 0.9, "diligence": 0.5, "rating_noise_sd": 0.2,
       "message_propensity": {"blind-random": 0.1, "IDENTIFIED_RANDOM": 0.6}},
      {"quality": 0.1}]})"));
  REQUIRE(list.agents.size() == 2);
  CHECK(list.agents[0].diligence == 0.5);
  CHECK(list.agents[0].message_propensity == PerCondition{0.1, 0.6, 0.4});
  CHECK(list.agents[1].quality == 0.1);
  CHECK(make_cohort(list, 2, 1) == list.agents);
  CHECK(code_of([&] { (void)make_cohort(list, 3, 1); }) == ErrorCode::ConfigInvalid);

  const auto dist = parse_agent_spec(json::parse(
      R"({"distribution": {"quality": {"uniform": [0.2, 0.4]}, "message_propensity": 0.3}})"));
  const auto cohort = make_cohort(dist, 50, 9);
  for (const auto& a : cohort) {
    CHECK(a.quality >= 0.2);
    CHECK(a.quality <= 0.4);
    CHECK(a.message_propensity == PerCondition{0.3, 0.3, 0.3});
  }
  CHECK(make_cohort(dist, 50, 9) == cohort);
  CHECK(make_cohort(dist, 50, 10) != cohort);

  const auto even = make_cohort(parse_agent_spec(json::parse(R"({"distribution": {"quality": "even"}})")), 4, 0);
  CHECK(even[0].quality == 0.125);
  CHECK(even[3].quality == 0.875);

  for (const char* bad : {R"({"agents": [{"quality": 1.5}]})", R"({"agents": [{"diligence": 1}]})",
                          R"({"agents": []})", R"({"distribution": {"diligence": -0.1}})",
                          R"({"distribution": {"quality": {"uniform": [0.8, 0.2]}}})",
                          R"({"distribution": {"quality": {"cauchy": [0, 1]}}})",
                          R"({"distribution": {"message_propensity": {"telepathic": 0.5}}})", R"({"neither": 1})",
                          R"([1, 2])"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { (void)parse_agent_spec(json::parse(bad)); }) == ErrorCode::ConfigInvalid);
  }
}

TEST_CASE("invalid simulation configs") {
  CHECK(code_of([] { (void)run_simulation(config(1, 1, Condition::BlindRandom, 0)); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)run_simulation(config(5, 0, Condition::BlindRandom, 0)); }) == ErrorCode::ConfigInvalid);
  auto c = config(5, 1, Condition::BlindRandom, 0);
  c.k = 0;
  CHECK(code_of([&] { (void)run_simulation(c); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("cohort of two runs with fan-out one") {
  const auto m = run_simulation(config(2, 2, Condition::IdentifiedIncentive, 3));
  REQUIRE(m.size() == 2);
  for (const auto& r : m) {
    CHECK(r.fan_out == 1);
    CHECK(r.tasks_delivered == 2);
    CHECK(r.reviews_written == 2);
    CHECK(r.grades.size() == 2);
  }
}

TEST_CASE("conservation of tasks, reviews and ratings") {
  for (auto condition : {Condition::BlindRandom, Condition::IdentifiedRandom, Condition::IdentifiedIncentive}) {
    for (int n : {3, 4, 7, 30}) {
      const auto m = run_simulation(config(n, 3, condition, 11));
      for (const auto& r : m) {
        const auto d = static_cast<std::size_t>(std::min(3, n - 1));
        CHECK(r.tasks_delivered == n * d);
        CHECK(r.reviews_written == r.tasks_delivered);
        CHECK(r.ratings == r.reviews_written);
        CHECK(r.usefulness.n == r.ratings);
        CHECK(r.grades.size() == static_cast<std::size_t>(n));
      }
    }
  }

  // Unreliable reviewers: tasks still go out, reviews shrink, every written
  // review is rated.
  auto c = config(20, 3, Condition::IdentifiedIncentive, 4);
  c.agents.shared.diligence = 0.6;
  for (const auto& r : run_simulation(c)) {
    CHECK(r.tasks_delivered == 60);
    CHECK(r.reviews_written < r.tasks_delivered);
    CHECK(r.reviews_written > 0);
    CHECK(r.ratings == r.reviews_written);
  }
}

TEST_CASE("cold start: random and incentive agree on round one") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto rnd = run_simulation(config(30, 2, Condition::IdentifiedRandom, seed));
    auto inc = run_simulation(config(30, 2, Condition::IdentifiedIncentive, seed));
    auto first = rnd[0];
    first.condition = inc[0].condition;
    CHECK(first == inc[0]);
    CHECK(inc[0].assortativity_degenerate);
    // From round two on the policies diverge.
    CHECK(rnd[1].assortativity != inc[1].assortativity);
  }
}

TEST_CASE("simulation is deterministic in its config") {
  auto c = config(12, 4, Condition::BlindRandom, 77);
  c.agents.shared.rating_noise_sd = 0.7;
  c.agents.shared.diligence = 0.8;
  const auto a = run_simulation(c);
  CHECK(run_simulation(c) == a);
  c.seed = 78;
  CHECK(run_simulation(c) != a);
}

TEST_CASE("zero-noise incentive round two with distinct qualities") {
  auto c = config(30, 2, Condition::IdentifiedIncentive, 2024);
  c.agents.law = AgentSpec::QualityLaw::Even;
  const auto m = run_simulation(c);
  CHECK_FALSE(m[1].assortativity_degenerate);
  CHECK(m[1].assortativity >= 0.9);
}

TEST_CASE("incentive is more assortative than random from round two") {
  for (int n : {10, 30, 100}) {
    constexpr int kSeeds = 50;
    double inc = 0.0;
    double rnd = 0.0;
    int samples = 0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      const auto a = run_simulation(config(n, 3, Condition::IdentifiedIncentive, seed));
      const auto b = run_simulation(config(n, 3, Condition::IdentifiedRandom, seed));
      for (std::size_t r = 1; r < a.size(); ++r) {
        inc += a[r].assortativity;
        rnd += b[r].assortativity;
        ++samples;
      }
    }
    CAPTURE(n);
    CHECK(inc / samples > rnd / samples);
  }
}

TEST_CASE("grade gap") {
  SUBCASE("identical agents have no gap") {
    auto c = config(15, 2, Condition::IdentifiedIncentive, 5);
    c.agents.law = AgentSpec::QualityLaw::Uniform;
    c.agents.a = c.agents.b = 0.6;
    for (const auto& r : run_simulation(c)) CHECK(grade_gap(r) == 0.0);
  }
  SUBCASE("injected uniform grades") {
    RoundMetrics m;
    m.released = true;
    for (int g = 0; g <= 100; ++g) m.grades.emplace_back(ParticipantId{"p" + std::to_string(g)}, g);
    // Sorting oracle: 91st and 11th smallest of 0..100.
    CHECK(grade_gap(m) == 80.0);
  }
  SUBCASE("before release") {
    RoundMetrics m;
    m.grades.emplace_back(ParticipantId{"p"}, 50);
    CHECK(code_of([&] { (void)grade_gap(m); }) == ErrorCode::GradesNotReleased);
  }
  SUBCASE("grades track author quality") {
    auto c = config(11, 1, Condition::BlindRandom, 5);
    c.agents.law = AgentSpec::QualityLaw::Even;
    const auto m = run_simulation(c);
    std::set<int> grades;
    for (const auto& [_, g] : m[0].grades) grades.insert(g);
    CHECK(grades.size() == 11);
    CHECK(grade_gap(m[0]) == doctest::Approx(72.0).epsilon(0.02));  // (9.5 - 1.5) / 11 * 100 ~ 72.7
  }
}

TEST_CASE("learning moves quality toward received usefulness") {
  auto c = config(20, 4, Condition::IdentifiedIncentive, 8);
  const auto still = run_simulation(c);
  c.agents.shared.learning_rate = 0.5;
  const auto learning = run_simulation(c);
  CHECK(still[0] == learning[0]);
  CHECK(still[3].grades != learning[3].grades);
  CHECK(still[1].grades == still[0].grades);
}

TEST_CASE("short reviews are nudged") {
  auto c = config(10, 1, Condition::IdentifiedRandom, 1);
  c.agents.law = AgentSpec::QualityLaw::Uniform;
  c.agents.a = c.agents.b = 0.0;  // four-word fields
  CHECK(run_simulation(c)[0].nudged_reviews == 30);
  c.agents.a = c.agents.b = 1.0;  // thirty-word fields
  CHECK(run_simulation(c)[0].nudged_reviews == 0);
}

TEST_CASE("csv export") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(3.0) == "3");

  std::vector<RoundMetrics> all;
  for (auto condition : {Condition::BlindRandom, Condition::IdentifiedRandom, Condition::IdentifiedIncentive}) {
    const auto m = run_simulation(config(6, 5, condition, 3));
    all.insert(all.end(), m.begin(), m.end());
  }
  std::ostringstream out;
  write_csv(out, all);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,condition,metric,label,value,n");
  std::set<std::pair<std::string, std::string>> groups;
  bool quoted_label = false;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    groups.emplace(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1));
    if (line.find("\"reviews per student, each way\"") != std::string::npos) quoted_label = true;
  }
  CHECK(groups.size() == 15);
  CHECK(quoted_label);

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "ipr_sim_test_metrics.csv";
  export_csv(all, path);
  std::ifstream file(path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  CHECK(buffer.str() == out.str());
  std::filesystem::remove(path);

  CHECK(code_of([&] { export_csv(all, "/nonexistent-dir/metrics.csv"); }) == ErrorCode::IoFailure);
}
