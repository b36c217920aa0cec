#include "mdrate/simulate/estimate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdrate {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::crude: return "crude";
    case Method::tilted: return "tilted";
    case Method::split: return "split";
    case Method::conditional_lower: return "conditional-lower";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::crude, Method::tilted, Method::split, Method::conditional_lower}) {
    if (method_name(m) == s) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(s));
}

std::string flags_text(unsigned flags) {
  static constexpr std::pair<unsigned, const char*> kNames[] = {
      {flag::zero_hits, "zero_hits"},         {flag::low_count, "low_count"},
      {flag::clipped, "clipped"},             {flag::tilt_failed, "tilt_failed"},
      {flag::drift_invalid, "drift_invalid"}, {flag::union_vacuous, "union_vacuous"},
      {flag::estimator_error, "error"},
  };
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

void finish_estimate(Estimate& e, const ScaleFunction& g, double log_p, double rel_stderr) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  e.log_p = std::min(log_p, 0.0);
  e.rel_stderr = rel_stderr;
  if (e.log_p == -inf) {
    e.p_hat = 0.0;
    e.stderr_p = 0.0;
    e.rel_stderr = 0.0;
    e.normalized = -inf;
    e.flags |= flag::zero_hits | flag::low_count;
  } else {
    e.p_hat = std::exp(e.log_p);
    e.stderr_p = e.p_hat * rel_stderr;
    e.normalized = e.log_p / g(std::log(static_cast<double>(e.n)));
  }
  if (e.hits < 100) e.flags |= flag::low_count;
}

}  // namespace mdrate
