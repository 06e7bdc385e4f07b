#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ipr::api {

struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data";
  std::string log_level = "info";
  std::string admin_token;
  int token_ttl_hours = 24 * 120;
  bool fsync = true;
};

/// Applies `key = value` lines to `into`. Blank lines and lines starting
/// with '#' are skipped. Throws Error(ConfigInvalid) on unknown keys or bad
/// values.
void apply_config_text(Config& into, std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// Process environment lookup (std::getenv).
std::optional<std::string> process_env(const char* name);

/// Defaults, then the file (if given), then PORT, DATA_DIR, LOG_LEVEL and
/// ADMIN_TOKEN from the environment. Throws Error(ConfigInvalid) if the
/// result has no admin token.
Config load_config(const std::optional<std::filesystem::path>& file,
                   const EnvLookup& env = process_env);

}  // namespace ipr::api
