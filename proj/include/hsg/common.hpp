#pragma once

#include <cstdio>
#include <string>

namespace hsg {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.7724538509055160273;     // sqrt(pi)
inline constexpr double kPiQuarterInv = 0.75112554446494248; // pi^(-1/4)

/// Format a double with 17 significant digits (round-trips bit-exactly).
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

} // namespace hsg
