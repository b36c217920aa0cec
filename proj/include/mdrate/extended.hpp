// Extended-real helpers. +inf stands for an infinite exponent or variance,
// -inf for log 0.
#pragma once

#include <cmath>
#include <limits>

namespace mdrate {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_pos_inf(double v) { return std::isinf(v) && v > 0.0; }

// log with log 0 = -inf.
inline double safe_log(double p) { return p > 0.0 ? std::log(p) : -kInf; }

}  // namespace mdrate
