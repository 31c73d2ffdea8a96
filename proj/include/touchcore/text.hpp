#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace touchcore {

/// Shortest decimal rendering that parses back to the identical double.
/// Non-finite values render as JSON `null`.
inline void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  if (v == 0.0) {
    v = 0.0;  // no negative zero; "-0" would not survive a JSON integer parse
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

}  // namespace touchcore
