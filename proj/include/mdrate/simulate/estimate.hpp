#pragma once

#include "mdrate/scale.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace mdrate {

enum class Method { crude, tilted, split, conditional_lower };

std::string_view method_name(Method m);
Method parse_method(std::string_view s);  // throws std::invalid_argument

namespace flag {
inline constexpr unsigned zero_hits = 1u << 0;       // p_hat = 0, normalized = -inf (censored)
inline constexpr unsigned low_count = 1u << 1;       // fewer than 100 hits
inline constexpr unsigned clipped = 1u << 2;         // upper bound clipped to 1
inline constexpr unsigned tilt_failed = 1u << 3;     // no tilting root below the boundary
inline constexpr unsigned drift_invalid = 1u << 4;   // n|mu_n| > eps * a_n at this n
inline constexpr unsigned union_vacuous = 1u << 5;   // n P(X > sqrt(n)/g(log n)) >= 1
inline constexpr unsigned estimator_error = 1u << 6;
}  // namespace flag

// Flag names joined with '|', or "" when none are set.
std::string flags_text(unsigned flags);

struct Estimate {
  double p_hat = 0.0;
  double stderr_p = 0.0;
  double rel_stderr = 0.0;  // stderr / p_hat, kept separately since stderr may underflow
  std::int64_t n = 0;
  double x = 0.0;
  double log_p = 0.0;       // authoritative for tiny probabilities
  double normalized = 0.0;  // log_p / g(log n)
  Method method = Method::crude;
  unsigned flags = 0;
  std::uint64_t reps = 0;
  std::uint64_t hits = 0;
};

// Fills log_p, normalized, p_hat and the zero/low-count flags from log_p and rel_stderr.
void finish_estimate(Estimate& e, const ScaleFunction& g, double log_p, double rel_stderr);

}  // namespace mdrate
