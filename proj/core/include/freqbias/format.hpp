#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace freqbias {

/// Shortest round-trip decimal form of a double (std::to_chars), used for
/// every floating-point value written to CSV so that re-parsing recovers
/// the exact bits and repeated runs emit identical bytes.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace freqbias
