#include "ipr/sim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "draws.hpp"
#include "ipr/error.hpp"

namespace ipr::sim {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

double number(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) invalid(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

PerCondition propensities(const json& j, PerCondition fallback) {
  const auto it = j.find("message_propensity");
  if (it == j.end()) return fallback;
  if (it->is_number()) return {it->get<double>(), it->get<double>(), it->get<double>()};
  if (!it->is_object()) invalid("'message_propensity' must be a number or an object keyed by condition");
  for (const auto& [name, value] : it->items()) {
    Condition c{};
    try {
      c = parse_condition(name);
    } catch (const Error&) {
      invalid("unknown condition '" + name + "' in message_propensity");
    }
    if (!value.is_number()) invalid("message_propensity values must be numbers");
    fallback[static_cast<std::size_t>(c)] = value.get<double>();
  }
  return fallback;
}

AgentProfile profile(const json& j, const AgentProfile& base) {
  if (!j.is_object()) invalid("agent entries must be objects");
  AgentProfile p = base;
  p.diligence = number(j, "diligence", base.diligence);
  p.rating_noise_sd = number(j, "rating_noise_sd", base.rating_noise_sd);
  p.learning_rate = number(j, "learning_rate", base.learning_rate);
  p.message_propensity = propensities(j, base.message_propensity);
  return p;
}

bool probability(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const AgentProfile& p) {
  if (!probability(p.quality)) invalid("quality must be in [0, 1]");
  if (!probability(p.diligence)) invalid("diligence must be in [0, 1]");
  for (double m : p.message_propensity) {
    if (!probability(m)) invalid("message_propensity must be in [0, 1]");
  }
  if (!(p.rating_noise_sd >= 0.0) || !std::isfinite(p.rating_noise_sd)) invalid("rating_noise_sd must be >= 0");
  if (!probability(p.learning_rate)) invalid("learning_rate must be in [0, 1]");
}

AgentSpec parse_agent_spec(const json& j) {
  if (!j.is_object()) invalid("agents file must hold a JSON object");
  AgentSpec spec;
  if (j.contains("agents")) {
    const auto& list = j["agents"];
    if (!list.is_array() || list.empty()) invalid("'agents' must be a non-empty array");
    for (const auto& entry : list) {
      auto p = profile(entry, AgentProfile{});
      if (!entry.contains("quality")) invalid("every agent needs a quality");
      p.quality = number(entry, "quality", 0.0);
      validate(p);
      spec.agents.push_back(p);
    }
    return spec;
  }
  if (!j.contains("distribution")) invalid("agents file needs 'agents' or 'distribution'");
  const auto& d = j["distribution"];
  spec.shared = profile(d, AgentProfile{});
  if (const auto it = d.find("quality"); it != d.end()) {
    if (*it == "even") {
      spec.law = AgentSpec::QualityLaw::Even;
    } else if (it->is_object() && it->size() == 1 && it->begin().value().is_array() &&
               it->begin().value().size() == 2 && it->begin().value()[0].is_number() &&
               it->begin().value()[1].is_number()) {
      const auto& args = it->begin().value();
      spec.a = args[0].get<double>();
      spec.b = args[1].get<double>();
      if (it->begin().key() == "uniform") {
        spec.law = AgentSpec::QualityLaw::Uniform;
        if (!probability(spec.a) || !probability(spec.b) || spec.a > spec.b) invalid("uniform bounds must satisfy 0 <= lo <= hi <= 1");
      } else if (it->begin().key() == "normal") {
        spec.law = AgentSpec::QualityLaw::Normal;
        if (spec.b < 0.0) invalid("normal sd must be >= 0");
      } else {
        invalid("quality law must be uniform, normal or even");
      }
    } else {
      invalid("quality must be \"even\", {\"uniform\": [lo, hi]} or {\"normal\": [mean, sd]}");
    }
  }
  validate(spec.shared);
  return spec;
}

AgentSpec load_agent_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read agents file " + path.string());
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) invalid(path.string() + " is not valid JSON");
  return parse_agent_spec(j);
}

std::vector<AgentProfile> make_cohort(const AgentSpec& spec, int cohort, std::uint64_t seed) {
  if (cohort < 2) invalid("cohort must be at least 2");
  if (!spec.agents.empty()) {
    if (static_cast<int>(spec.agents.size()) != cohort) {
      invalid("agents file lists " + std::to_string(spec.agents.size()) + " agents but the cohort is " +
              std::to_string(cohort));
    }
    return spec.agents;
  }
  std::vector<AgentProfile> out(static_cast<std::size_t>(cohort), spec.shared);
  for (int i = 0; i < cohort; ++i) {
    const auto k = detail::key(seed, {detail::kQuality, static_cast<std::uint64_t>(i)});
    double q = 0.0;
    switch (spec.law) {
      case AgentSpec::QualityLaw::Uniform: q = spec.a + (spec.b - spec.a) * detail::unit(k); break;
      case AgentSpec::QualityLaw::Normal: q = spec.a + spec.b * detail::normal(k); break;
      case AgentSpec::QualityLaw::Even: q = (i + 0.5) / cohort; break;
    }
    out[static_cast<std::size_t>(i)].quality = std::clamp(q, 0.0, 1.0);
  }
  return out;
}

}  // namespace ipr::sim
