// The six tail exponents: for tail(t) one of P(X > t), P(X < -t), P(|X| > t),
//   lam_bar   = -limsup log(t^2 tail(t)) / g(log t),
//   lam_under = -liminf log(t^2 tail(t)) / g(log t),
// with values in [0, inf].
#pragma once

#include "mdrate/scale.hpp"
#include "mdrate/tails.hpp"

#include <span>
#include <string>
#include <vector>

namespace mdrate {

inline constexpr double kLambdaMax = 50.0;

struct TailExponents {
  double lam1_bar = 0.0, lam1_under = 0.0;  // right tail
  double lam2_bar = 0.0, lam2_under = 0.0;  // left tail
  double lam_bar = 0.0, lam_under = 0.0;    // |X|
  friend bool operator==(const TailExponents&, const TailExponents&) = default;
};

// Ordering holds and every value lies in [0, inf].
bool well_ordered(const TailExponents& e);

enum class GridSpacing {
  geometric,  // equal ratios in t
  loglog,     // equal ratios in log t, for slowly separating oscillations
};

struct GridSpec {
  double t_min = 1e4;
  double t_max = 1e10;
  int points = 60;
  GridSpacing spacing = GridSpacing::geometric;

  std::vector<double> values() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Throws std::invalid_argument unless the grid has >= 60 points over >= 6
// decades and g(log t) > 0 at every point.
void validate_grid(const GridSpec& grid, const ScaleFunction& g);

enum class TailSide { right, left, both };

struct ExponentPair {
  double bar;
  double under;
};

// Trailing-window limsup/liminf on the last third of the grid. Each window
// point contributes the anchored secant
//   s(t) = -(a(t) - a(t_a)) / (g(log t) - g(log t_a)),  a(t) = log(t^2 tail(t)),
// with t_a the first grid point. s(t) has the same limits as -a(t)/g(log t)
// but cancels bounded additive terms in a(t). Values above kLambdaMax and
// zero tails map to inf; negative values clip to 0.
ExponentPair exponent_pair(const TailModel& model, const ScaleFunction& g, TailSide side,
                           const GridSpec& grid);

TailExponents exponents_from_tail(const TailModel& model, const ScaleFunction& g,
                                  const GridSpec& grid);

// Default r grid: 0, 0.05, ..., kLambdaMax.
std::vector<double> default_r_grid();

// Sup form: lam_bar is the largest r with t^2 e^{r g(log t)} tail(t) below its
// anchor value at every window point (full limit to 0); lam_under is the
// largest r where some window point is below it (subsequence to 0). If every
// r on the grid qualifies the result is inf.
TailExponents exponents_sup_form(const TailModel& model, const ScaleFunction& g,
                                 std::span<const double> r_grid, const GridSpec& t_probe);

struct Lemma33Predictions {
  // log(n P(X > s sqrt(n g(log n)))) / g(log n)
  double sqrt_ng_limsup;
  double sqrt_ng_liminf;
  // log(n P(X > s sqrt(n) / g(log n))) / g(log n)
  double sqrt_n_over_g_limsup;
  double sqrt_n_over_g_liminf;
};

Lemma33Predictions lemma33_predictions(const TailExponents& exps, double rho);

// Finite-n values of the two normalized quantities above.
double lemma33_sqrt_ng(const TailModel& model, const ScaleFunction& g, double s, double n);
double lemma33_sqrt_n_over_g(const TailModel& model, const ScaleFunction& g, double s, double n);

struct EmpiricalExponents {
  TailExponents exps;
  double t_lo;
  double t_hi;
  std::size_t exceedances_at_top;
  bool low_support;  // fewer than 100 exceedances at the largest grid point
};

// Coarse plug-in estimate from a sample (size >= 1e5): empirical tails on a
// 30-point geometric grid from the 90% quantile of |X| up to the 101st
// largest |X|, with the same windowed secant as exponents_from_tail.
EmpiricalExponents empirical_exponents(std::span<const double> sample, const ScaleFunction& g);

}  // namespace mdrate
