#pragma once

#include <array>
#include <charconv>
#include <string>

namespace flexctl {

// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace flexctl
