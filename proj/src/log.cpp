#include "log.hpp"

#include <cstdio>
#include <mutex>

namespace femdd {

namespace {

std::mutex g_mutex;
LogLevel g_level = LogLevel::warn;
LogSink g_sink;

}  // namespace

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "DEBUG";
    case LogLevel::info: return "INFO";
    case LogLevel::warn: return "WARN";
    case LogLevel::error: return "ERROR";
    case LogLevel::off: return "OFF";
  }
  return "?";
}

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void set_log_level(LogLevel level) {
  std::lock_guard lock(g_mutex);
  g_level = level;
}

LogLevel log_level() {
  std::lock_guard lock(g_mutex);
  return g_level;
}

bool log_enabled(LogLevel level) { return level >= log_level() && level != LogLevel::off; }

void log_message(LogLevel level, const std::string& body) {
  std::lock_guard lock(g_mutex);
  if (level < g_level || level == LogLevel::off) return;
  if (g_sink) {
    g_sink(level, body);
    return;
  }
  std::fprintf(stderr, "%s %s\n", level_name(level), body.c_str());
}

}  // namespace femdd
