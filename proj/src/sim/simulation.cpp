#include "ipr/sim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "draws.hpp"
#include "ipr/course.hpp"
#include "ipr/error.hpp"
#include "ipr/matching.hpp"
#include "ipr/nudge.hpp"
#include "ipr/stats.hpp"

namespace ipr::sim {

namespace {

using detail::key;

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (!xs.empty()) s.mean = stats::mean(xs);
  if (xs.size() >= 2) s.sd = stats::stddev(xs);
  return s;
}

/// Review field text whose length tracks the writer's quality: 4 words at
/// q = 0 up to 30 at q = 1, so low-quality reviewers trip the nudge.
std::string field_text(double quality, std::size_t field) {
  static constexpr std::string_view kWords[] = {"the", "draft", "could", "explain", "each", "step",
                                                "more", "clearly", "with", "an", "example"};
  const auto words = static_cast<std::size_t>(std::lround(4.0 + 26.0 * quality));
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) out += ' ';
    out += kWords[(w + field) % std::size(kWords)];
  }
  return out;
}

struct Written {
  ReviewId review;
  std::size_t reviewer;
  std::size_t slot;
  std::size_t author;
};

}  // namespace

std::vector<RoundMetrics> run_simulation(const SimConfig& config) {
  if (config.cohort < 2) throw Error(ErrorCode::ConfigInvalid, "cohort must be at least 2");
  if (config.rounds < 1) throw Error(ErrorCode::ConfigInvalid, "rounds must be at least 1");
  if (config.k < 1) throw Error(ErrorCode::ConfigInvalid, "k must be at least 1");
  if (config.scale.min > config.scale.max) throw Error(ErrorCode::ConfigInvalid, "grade scale is inverted");

  auto agents = make_cohort(config.agents, config.cohort, config.seed);
  const auto cond = static_cast<std::size_t>(config.condition);
  const auto seed = config.seed;

  Course course("sim");
  std::vector<RosterEntry> roster;
  std::map<ParticipantId, std::size_t> index;
  for (int i = 0; i < config.cohort; ++i) {
    roster.push_back({ParticipantId{"sim-p" + std::to_string(i + 1)}, "Agent " + std::to_string(i + 1)});
    index.emplace(roster.back().id, static_cast<std::size_t>(i));
  }

  // Logical clock: one second per operation from a fixed origin.
  Timestamp clock{std::chrono::milliseconds{1'600'000'000'000LL}};
  const auto tick = [&clock] { return clock += std::chrono::seconds{1}; };

  CourseConfig cc;
  cc.condition = config.condition;
  cc.k = config.k;
  cc.scale = config.scale;
  cc.seed = seed;
  const double range = config.scale.max - config.scale.min;

  std::vector<RoundMetrics> out;
  for (int r = 1; r <= config.rounds; ++r) {
    const auto ru = static_cast<std::uint64_t>(r);
    RoundMetrics m;
    m.round = r;
    m.condition = config.condition;
    m.cohort = agents.size();
    m.fan_out = effective_fan_out(config.k, config.cohort);

    const auto round = course.create_round(cc, roster, tick());
    for (const auto& e : roster) {
      course.submit_assignment(round, e.id, "sim://r" + std::to_string(r) + "/" + e.id.value, tick());
    }
    const auto scores = course.usefulness_scores(round);
    course.advance_phase(round, Phase::Reviewing, tick());
    const auto a = assortativity(course.assignment(round), scores);
    m.assortativity = a.value;
    m.assortativity_degenerate = a.degenerate;

    std::vector<std::vector<ReviewTask>> tasks_of(agents.size());
    for (auto& t : course.tasks_in_round(round)) tasks_of[index.at(t.reviewer)].push_back(std::move(t));

    std::vector<Written> written;
    std::vector<double> words;
    bool pending = false;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      for (std::size_t j = 0; j < tasks_of[i].size(); ++j) {
        const auto& t = tasks_of[i][j];
        ++m.tasks_delivered;
        if (detail::unit(key(seed, {detail::kDiligence, ru, i, j})) >= agents[i].diligence) {
          pending = true;
          continue;
        }
        const auto author = index.at(t.author);
        Prompts prompts;
        double total_words = 0.0;
        bool nudged = false;
        for (std::size_t f = 0; f < kPromptCount; ++f) {
          prompts[f] = field_text(agents[i].quality, f);
          total_words += static_cast<double>(word_count(prompts[f]));
          nudged = nudged || actionability_nudge(prompts[f], cc.nudge_threshold).has_value();
        }
        const int grade =
            config.scale.min + static_cast<int>(std::lround(agents[author].quality * range));
        const auto review = course.submit_review(t.id, t.reviewer, std::move(prompts), grade, tick());
        written.push_back({review.id, i, j, author});
        words.push_back(total_words);
        if (nudged) ++m.nudged_reviews;
      }
    }
    m.reviews_written = written.size();
    m.review_words = summarize(words);
    course.advance_phase(round, Phase::Rating, tick(), pending);

    std::vector<double> stars;
    std::vector<std::vector<double>> received(agents.size());
    for (const auto& w : written) {
      const auto& author = agents[w.author];
      const auto& reviewer = agents[w.reviewer];
      const auto& author_id = roster[w.author].id;
      if (detail::unit(key(seed, {detail::kAuthorMessage, ru, w.reviewer, w.slot})) <
          author.message_propensity[cond]) {
        course.post_message(w.review, author_id, "Could you say more about the second point?", tick());
        ++m.messages;
        ++m.threads_with_messages;
        if (detail::unit(key(seed, {detail::kReviewerReply, ru, w.reviewer, w.slot})) <
            reviewer.message_propensity[cond]) {
          course.post_message(w.review, roster[w.reviewer].id, "Yes: add one worked example.", tick());
          ++m.messages;
        }
      }
      const double noise =
          author.rating_noise_sd * detail::normal(key(seed, {detail::kRatingNoise, ru, w.reviewer, w.slot}));
      const int s = std::clamp(static_cast<int>(std::lround(1.0 + 4.0 * reviewer.quality + noise)), kMinStars,
                               kMaxStars);
      course.rate_feedback(w.review, author_id, s, tick());
      stars.push_back(s);
      received[w.author].push_back(s);
      ++m.ratings;
    }
    m.usefulness = summarize(stars);

    course.advance_phase(round, Phase::Released, tick());
    m.released = true;
    for (const auto& e : roster) {
      if (auto g = course.grade_report(round, e.id).aggregate) m.grades.emplace_back(e.id, *g);
    }

    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (received[i].empty() || agents[i].learning_rate == 0.0) continue;
      const double u = (stats::mean(received[i]) - kMinStars) / (kMaxStars - kMinStars);
      if (u > agents[i].quality) agents[i].quality += agents[i].learning_rate * (u - agents[i].quality);
    }
    out.push_back(std::move(m));
  }
  return out;
}

double grade_gap(const RoundMetrics& metrics) {
  if (!metrics.released) {
    throw Error(ErrorCode::GradesNotReleased, "round " + std::to_string(metrics.round) + " is not released");
  }
  std::vector<double> grades;
  for (const auto& [_, g] : metrics.grades) grades.push_back(g);
  return stats::percentile_nearest_rank(grades, 90) - stats::percentile_nearest_rank(grades, 10);
}

}  // namespace ipr::sim
