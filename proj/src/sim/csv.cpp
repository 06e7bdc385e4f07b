#include "ipr/sim/csv.hpp"

#include <charconv>
#include <fstream>

#include "ipr/error.hpp"

namespace ipr::sim {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

namespace {

struct Row {
  std::string_view metric;
  std::string label;
  double value;
  std::size_t n;
};

std::vector<Row> rows_for(const RoundMetrics& m) {
  std::vector<Row> rows{
      {"fan_out", "reviews per student, each way", static_cast<double>(m.fan_out), m.cohort},
      {"tasks_delivered", "", static_cast<double>(m.tasks_delivered), m.tasks_delivered},
      {"reviews_written", "", static_cast<double>(m.reviews_written), m.tasks_delivered},
      {"ratings", "", static_cast<double>(m.ratings), m.reviews_written},
      {"usefulness_mean", "stars, 1-5", m.usefulness.mean, m.usefulness.n},
      {"usefulness_sd", "stars, 1-5", m.usefulness.sd, m.usefulness.n},
      {"review_words_mean", "words per review", m.review_words.mean, m.review_words.n},
      {"review_words_sd", "words per review", m.review_words.sd, m.review_words.n},
      {"nudged_reviews", "at least one short field", static_cast<double>(m.nudged_reviews), m.reviews_written},
      {"messages", "", static_cast<double>(m.messages), m.reviews_written},
      {"threads_with_messages", "", static_cast<double>(m.threads_with_messages), m.reviews_written},
      {"assortativity", m.assortativity_degenerate ? "degenerate" : "spearman",
       m.assortativity, m.cohort},
  };
  if (m.released && !m.grades.empty()) rows.push_back({"grade_gap", "p90 - p10", grade_gap(m), m.grades.size()});
  for (const auto& [participant, grade] : m.grades) {
    rows.push_back({"grade", participant.value, static_cast<double>(grade), 1});
  }
  return rows;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const RoundMetrics> metrics) {
  out << "round,condition,metric,label,value,n\n";
  for (const auto& m : metrics) {
    const auto condition = csv_field(to_cli_string(m.condition));
    for (const auto& row : rows_for(m)) {
      out << m.round << ',' << condition << ',' << csv_field(row.metric) << ',' << csv_field(row.label) << ','
          << format_number(row.value) << ',' << row.n << '\n';
    }
  }
}

void export_csv(std::span<const RoundMetrics> metrics, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  write_csv(out, metrics);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

}  // namespace ipr::sim
