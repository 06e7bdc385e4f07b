#include "ipr/api/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>

#include "ipr/error.hpp"

namespace ipr::api {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view key, std::string_view value, int lo, int hi) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out < lo || out > hi) {
    throw Error(ErrorCode::ConfigInvalid,
                std::string(key) + " must be an integer in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "], got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::ConfigInvalid, std::string(key) + " must be true or false");
}

void set(Config& c, std::string_view key, std::string_view value) {
  if (key == "port") {
    c.port = parse_int(key, value, 0, 65535);
  } else if (key == "host") {
    c.host = value;
  } else if (key == "data_dir") {
    c.data_dir = std::string(value);
  } else if (key == "log_level") {
    if (value != "trace" && value != "debug" && value != "info" && value != "warn" &&
        value != "error" && value != "off") {
      throw Error(ErrorCode::ConfigInvalid, "unknown log_level '" + std::string(value) + "'");
    }
    c.log_level = value;
  } else if (key == "admin_token") {
    c.admin_token = value;
  } else if (key == "token_ttl_hours") {
    c.token_ttl_hours = parse_int(key, value, 1, 24 * 3650);
  } else if (key == "fsync") {
    c.fsync = parse_bool(key, value);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace

void apply_config_text(Config& into, std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key=value");
    }
    set(into, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

Config load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  Config c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read config file " + file->string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    apply_config_text(c, text);
  }
  for (const auto& [var, key] : {std::pair{"PORT", "port"},
                                 std::pair{"DATA_DIR", "data_dir"},
                                 std::pair{"LOG_LEVEL", "log_level"},
                                 std::pair{"ADMIN_TOKEN", "admin_token"}}) {
    if (auto v = env(var)) set(c, key, trim(*v));
  }
  if (c.admin_token.empty()) throw Error(ErrorCode::ConfigInvalid, "admin_token is not set");
  return c;
}

}  // namespace ipr::api
