// Small numeric helpers shared by the library sources.
#pragma once

#include "mdrate/extended.hpp"

#include <cmath>

namespace mdrate::detail {

// log(1 - e^a) for a <= 0.
inline double log1mexp(double a) {
  if (a == -kInf) return 0.0;
  return a > -0.6931471805599453 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}

inline double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// log P(Z > z) for standard normal Z.
inline double log_norm_sf(double z) {
  if (z < 30.0) return std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - 0.9189385332046728 + std::log(series);
}

}  // namespace mdrate::detail
