#pragma once

#include <charconv>
#include <string>

namespace femdd {

/// 17 significant digits: lossless for IEEE doubles and locale independent.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

/// Short form for log lines.
inline std::string format_short(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace femdd
