#pragma once

#include <charconv>
#include <string>

namespace dvfsim::detail {

// shortest decimal form that round-trips the exact double
inline std::string fmt_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace dvfsim::detail
