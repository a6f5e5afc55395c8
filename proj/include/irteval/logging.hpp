#pragma once

#include <string>
#include <string_view>

namespace irteval {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3, off = 4 };

void set_log_level(LogLevel level);
LogLevel log_level();

/// Parses "debug" | "info" | "warning" | "error" | "off".
LogLevel parse_log_level(std::string_view text);

/// Writes one line to stderr when `level` >= the configured level.
void log_message(LogLevel level, const std::string& message);

inline void log_warning(const std::string& message) { log_message(LogLevel::warning, message); }
inline void log_info(const std::string& message) { log_message(LogLevel::info, message); }

}  // namespace irteval
