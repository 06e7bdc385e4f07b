#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "ipr/sim/simulation.hpp"

namespace ipr::sim {

/// Quotes a field when it holds a comma, quote, CR or LF (RFC 4180).
std::string csv_field(std::string_view text);

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_number(double value);

/// Header "round,condition,metric,label,value,n" then one row per
/// (round, condition, metric).
void write_csv(std::ostream& out, std::span<const RoundMetrics> metrics);

/// Throws Error(IoFailure) if the file cannot be written.
void export_csv(std::span<const RoundMetrics> metrics, const std::filesystem::path& path);

}  // namespace ipr::sim
