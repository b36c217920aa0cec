#include "mdrate/rate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mdrate {

std::string_view side_name(Side s) {
  switch (s) {
    case Side::upper: return "upper";
    case Side::lower: return "lower";
    case Side::two_sided: return "two_sided";
  }
  return "?";
}

Side parse_side(std::string_view s) {
  if (s == "upper") return Side::upper;
  if (s == "lower") return Side::lower;
  if (s == "two_sided" || s == "two-sided") return Side::two_sided;
  throw std::invalid_argument("unknown side: " + std::string(s));
}

void validate(const RateSpec& spec) {
  if (!(spec.sigma2 > 0.0) || !std::isfinite(spec.sigma2))
    throw std::invalid_argument("sigma2 must be finite and positive");
  if (!(spec.rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  if (!well_ordered(spec.exps)) throw std::invalid_argument("tail exponents are not well ordered");
}

namespace {

// -(a min b) with -(a min inf) = -a.
double neg_min(double quad, double tail) { return -std::min(quad, tail); }

double rate(const RateSpec& spec, double x, double lambda) {
  validate(spec);
  if (!(x > 0.0)) throw std::invalid_argument("x must be positive");
  return neg_min(x * x / (2.0 * spec.sigma2), lambda / std::pow(2.0, spec.rho));
}

}  // namespace

double rate_limsup(const RateSpec& spec, double x, Side side) {
  const auto& e = spec.exps;
  const double lam = side == Side::upper ? e.lam1_bar : side == Side::lower ? e.lam2_bar : e.lam_bar;
  return rate(spec, x, lam);
}

double rate_liminf(const RateSpec& spec, double x, Side side) {
  const auto& e = spec.exps;
  const double lam =
      side == Side::upper ? e.lam1_under : side == Side::lower ? e.lam2_under : e.lam_under;
  return rate(spec, x, lam);
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::LIMIT_ZERO: return "LIMIT_ZERO";
    case Regime::BOUNDED_NONZERO_LIMSUP: return "BOUNDED_NONZERO_LIMSUP";
    case Regime::BOUNDED_NONZERO_LIMINF_TOO: return "BOUNDED_NONZERO_LIMINF_TOO";
    case Regime::MINUS_INFINITY: return "MINUS_INFINITY";
    case Regime::MIXED: return "MIXED";
  }
  return "?";
}

Regime classify(double sigma2, bool mean_matches_eta, const TailExponents& exps, double /*rho*/) {
  if (!mean_matches_eta || is_pos_inf(sigma2)) return Regime::LIMIT_ZERO;
  if (sigma2 == 0.0) return Regime::MINUS_INFINITY;
  const double l1 = exps.lam_bar, l2 = exps.lam_under;
  if (l1 > 0.0 && l2 > 0.0) return Regime::BOUNDED_NONZERO_LIMINF_TOO;
  if (l1 > 0.0) return Regime::BOUNDED_NONZERO_LIMSUP;
  if (l2 > 0.0) return Regime::MIXED;
  return Regime::LIMIT_ZERO;
}

void write_rate_curve(std::ostream& os, const RateSpec& spec, std::span<const double> xs,
                      Side side) {
  os << "x,rate_limsup,rate_liminf\n";
  char buf[128];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, rate_limsup(spec, x, side),
                  rate_liminf(spec, x, side));
    os << buf;
  }
}

}  // namespace mdrate
