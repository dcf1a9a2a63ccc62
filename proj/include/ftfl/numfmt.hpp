#pragma once

#include <array>
#include <charconv>
#include <string>

namespace ftfl {

// Shortest decimal form that parses back to the same double.
inline std::string fmt_double(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), std::size_t(p - buf.data()));
}

}  // namespace ftfl
