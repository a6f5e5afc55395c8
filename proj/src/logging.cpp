#include "irteval/logging.hpp"

#include <atomic>
#include <cstdio>

#include "irteval/errors.hpp"

namespace irteval {

namespace {

std::atomic<LogLevel> g_level{LogLevel::info};

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warning: return "warning";
    case LogLevel::error: return "error";
    default: return "off";
  }
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }

LogLevel log_level() { return g_level.load(); }

LogLevel parse_log_level(std::string_view text) {
  if (text == "debug") return LogLevel::debug;
  if (text == "info") return LogLevel::info;
  if (text == "warning" || text == "warn") return LogLevel::warning;
  if (text == "error") return LogLevel::error;
  if (text == "off") return LogLevel::off;
  throw ValidationError("unknown log level: " + std::string(text));
}

void log_message(LogLevel level, const std::string& message) {
  if (level < g_level.load() || level == LogLevel::off) return;
  std::fprintf(stderr, "[irteval %s] %s\n", level_tag(level), message.c_str());
}

}  // namespace irteval
