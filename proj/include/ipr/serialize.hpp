#pragma once

#include <nlohmann/json.hpp>

#include "ipr/course.hpp"
#include "ipr/types.hpp"

namespace ipr {

void to_json(nlohmann::json& j, const Condition& c);
void from_json(const nlohmann::json& j, Condition& c);
void to_json(nlohmann::json& j, const Phase& p);
void from_json(const nlohmann::json& j, Phase& p);
void to_json(nlohmann::json& j, const TaskStatus& s);
void from_json(const nlohmann::json& j, TaskStatus& s);

void to_json(nlohmann::json& j, const GradeScale& s);
void from_json(const nlohmann::json& j, GradeScale& s);
void to_json(nlohmann::json& j, const CourseConfig& c);
void from_json(const nlohmann::json& j, CourseConfig& c);
void to_json(nlohmann::json& j, const Participant& p);
void from_json(const nlohmann::json& j, Participant& p);
void to_json(nlohmann::json& j, const CourseRound& r);
void from_json(const nlohmann::json& j, CourseRound& r);
void to_json(nlohmann::json& j, const Submission& s);
void from_json(const nlohmann::json& j, Submission& s);
void to_json(nlohmann::json& j, const ReviewTask& t);
void from_json(const nlohmann::json& j, ReviewTask& t);
void to_json(nlohmann::json& j, const Review& r);
void from_json(const nlohmann::json& j, Review& r);
void to_json(nlohmann::json& j, const UsefulnessRating& r);
void from_json(const nlohmann::json& j, UsefulnessRating& r);
void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);
void to_json(nlohmann::json& j, const GradeReport& g);

void to_json(nlohmann::json& j, const CourseState& s);
void from_json(const nlohmann::json& j, CourseState& s);

/// Deadlines keyed by phase name; timestamps as RFC 3339 strings.
nlohmann::json deadlines_to_json(const std::map<Phase, Timestamp>& deadlines);
std::map<Phase, Timestamp> deadlines_from_json(const nlohmann::json& j);

}  // namespace ipr
