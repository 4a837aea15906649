#pragma once

#include <string_view>

namespace bsym::cli {

enum class LogLevel { quiet = 0, error, warn, info, debug };

/// Reads BSYM_LOG (quiet|error|warn|info|debug, default warn) once.
LogLevel log_level();

/// Writes "[bsym <level>] message" to stderr when enabled.
void log(LogLevel level, std::string_view message);

}  // namespace bsym::cli
