// Scalar reference math shared by the kernel implementations. The AVX2
// variants in avx2.cpp mirror these line by line.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace mdrate::kernels::ref {

namespace c {
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kInvLn2 = 1.44269504088896338700e+00;
inline constexpr double kSqrt2 = 1.41421356237309514547e+00;

inline constexpr double kLg1 = 6.666666666666735130e-01;
inline constexpr double kLg2 = 3.999999999940941908e-01;
inline constexpr double kLg3 = 2.857142874366239149e-01;
inline constexpr double kLg4 = 2.222219843214978396e-01;
inline constexpr double kLg5 = 1.818357216161805012e-01;
inline constexpr double kLg6 = 1.531383769920937332e-01;
inline constexpr double kLg7 = 1.479819860511658591e-01;

inline constexpr double kP1 = 1.66666666666666019037e-01;
inline constexpr double kP2 = -2.77777777770155933842e-03;
inline constexpr double kP3 = 6.61375632143793436117e-05;
inline constexpr double kP4 = -1.65339022054652515390e-06;
inline constexpr double kP5 = 4.13813679705723846039e-08;

inline constexpr double kExpOverflow = 7.09782712893383973096e+02;
inline constexpr double kExpUnderflow = -7.45133219101941108420e+02;
inline constexpr double kTwo54 = 0x1.0p54;
inline constexpr double kMinNormal = 0x1.0p-1022;

// AS241 PPND16 coefficients, highest degree last.
inline constexpr double kA[8] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
inline constexpr double kB[8] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
inline constexpr double kC[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                 5.76949722146069140550e0,  3.64784832476320460504e0,
                                 1.27045825245236838258e0,  2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
inline constexpr double kD[8] = {1.0,
                                 2.05319162663775882187e0,  1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
inline constexpr double kE[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                 1.78482653991729133580e0,  2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
inline constexpr double kF[8] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};
}  // namespace c

inline double horner8(const double (&k)[8], double x) {
  double r = k[7];
  for (int i = 6; i >= 0; --i) r = r * x + k[i];
  return r;
}

inline double log(double x) {
  if (std::isnan(x) || x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;
  double bias = 0.0;
  if (x < c::kMinNormal) {
    x *= c::kTwo54;
    bias = 54.0;
  }
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  double e = static_cast<double>(bits >> 52) - 1023.0 - bias;
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffull) | 0x3ff0000000000000ull);
  if (m > c::kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double f = m - 1.0;
  const double s = f / (2.0 + f);
  const double z = s * s;
  const double w = z * z;
  const double t1 = w * (c::kLg2 + w * (c::kLg4 + w * c::kLg6));
  const double t2 = z * (c::kLg1 + w * (c::kLg3 + w * (c::kLg5 + w * c::kLg7)));
  const double r = t2 + t1;
  const double hfsq = 0.5 * f * f;
  return e * c::kLn2Hi - ((hfsq - (s * (hfsq + r) + e * c::kLn2Lo)) - f);
}

inline double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > c::kExpOverflow) return std::numeric_limits<double>::infinity();
  if (x < c::kExpUnderflow) return 0.0;
  const double k = std::nearbyint(x * c::kInvLn2);
  const double hi = x - k * c::kLn2Hi;
  const double lo = k * c::kLn2Lo;
  const double r = hi - lo;
  const double t = r * r;
  const double cc = r - t * (c::kP1 + t * (c::kP2 + t * (c::kP3 + t * (c::kP4 + t * c::kP5))));
  const double y = 1.0 - ((lo - (r * cc) / (2.0 - cc)) - hi);
  const auto ki = static_cast<std::int64_t>(k);
  const std::int64_t k1 = ki >> 1;
  const std::int64_t k2 = ki - k1;
  const double s1 = std::bit_cast<double>(static_cast<std::uint64_t>(k1 + 1023) << 52);
  const double s2 = std::bit_cast<double>(static_cast<std::uint64_t>(k2 + 1023) << 52);
  return (y * s1) * s2;
}

inline double normal_quantile(double u) {
  const double q = u - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner8(c::kA, r) / horner8(c::kB, r);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-log(r));
  double v;
  if (r <= 5.0) {
    r = r - 1.6;
    v = horner8(c::kC, r) / horner8(c::kD, r);
  } else {
    r = r - 5.0;
    v = horner8(c::kE, r) / horner8(c::kF, r);
  }
  return q < 0.0 ? -v : v;
}

inline double pareto_quantile(double u, double scale, double alpha) {
  return scale * exp(-log(1.0 - u) / alpha);
}

}  // namespace mdrate::kernels::ref
