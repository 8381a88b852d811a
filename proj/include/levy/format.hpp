#pragma once

#include <charconv>
#include <string>

namespace levy {

// Shortest decimal form that round-trips the exact double. Used for every
// number the CLI emits so output is byte-stable across runs and locales.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace levy
