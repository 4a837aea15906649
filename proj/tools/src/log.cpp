#include "bsym/cli/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace bsym::cli {

namespace {

LogLevel parse_level(const char* raw) {
  if (!raw) return LogLevel::warn;
  const std::string v(raw);
  if (v == "quiet" || v == "0") return LogLevel::quiet;
  if (v == "error" || v == "1") return LogLevel::error;
  if (v == "info" || v == "3") return LogLevel::info;
  if (v == "debug" || v == "4") return LogLevel::debug;
  return LogLevel::warn;
}

const char* name(LogLevel level) {
  switch (level) {
    case LogLevel::error:
      return "error";
    case LogLevel::warn:
      return "warn";
    case LogLevel::info:
      return "info";
    case LogLevel::debug:
      return "debug";
    default:
      return "";
  }
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level(std::getenv("BSYM_LOG"));
  return level;
}

void log(LogLevel level, std::string_view message) {
  if (level == LogLevel::quiet || static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::cerr << "[bsym " << name(level) << "] " << message << '\n';
}

}  // namespace bsym::cli
