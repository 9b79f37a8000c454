#pragma once

#include <functional>
#include <string>

namespace femdd {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Lines are "LEVEL key=value ..." once the sink prepends the level name.
/// Default: warnings and errors to stderr.
void set_log_sink(LogSink sink);
void set_log_level(LogLevel level);
LogLevel log_level();
bool log_enabled(LogLevel level);
void log_message(LogLevel level, const std::string& body);
const char* level_name(LogLevel level);

}  // namespace femdd
