#pragma once

#include <charconv>
#include <string>

namespace deltasim {

// Shortest round-trip decimal form, matching the JSON serializer's intent so
// every emitted file is bit-stable across runs.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace deltasim
