// Rate functions -(x^2/(2 sigma^2) min lambda/2^rho) and the regime classifier.
#pragma once

#include "mdrate/exponents.hpp"

#include <iosfwd>
#include <span>
#include <string_view>

namespace mdrate {

enum class Side { upper, lower, two_sided };

std::string_view side_name(Side s);
Side parse_side(std::string_view s);  // throws std::invalid_argument

struct RateSpec {
  double sigma2;
  double rho;
  TailExponents exps;
};

// Throws std::invalid_argument unless 0 < sigma2 < inf, rho >= 0 and exps is well ordered.
void validate(const RateSpec& spec);

// upper uses lam1, lower uses lam2, two_sided uses the |X| exponents.
double rate_limsup(const RateSpec& spec, double x, Side side);
double rate_liminf(const RateSpec& spec, double x, Side side);

enum class Regime {
  LIMIT_ZERO,
  BOUNDED_NONZERO_LIMSUP,       // limsup in (-inf, 0) but liminf = 0; needs lam_bar > lam_under
  BOUNDED_NONZERO_LIMINF_TOO,   // limsup and liminf both in (-inf, 0)
  MINUS_INFINITY,
  MIXED,                        // limsup = 0, liminf in (-inf, 0)
};

std::string_view regime_name(Regime r);

// Two-sided regimes for P(|S_n - n eta| > x sqrt(n g(log n))). The
// classifier's lambda_1, lambda_2 are bound to lam_bar, lam_under of |X|.
Regime classify(double sigma2, bool mean_matches_eta, const TailExponents& exps, double rho);

// CSV with header x,rate_limsup,rate_liminf.
void write_rate_curve(std::ostream& os, const RateSpec& spec, std::span<const double> xs,
                      Side side);

}  // namespace mdrate
