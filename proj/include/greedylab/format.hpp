#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <string>

namespace greedylab {

/// 17 significant digits; '.' separator regardless of locale settings
/// because the process never calls setlocale.
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

/// Shortest decimal that round-trips, for canonical spec strings.
inline std::string format_shortest(double v) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

}  // namespace greedylab
