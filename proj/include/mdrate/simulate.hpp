// Monte Carlo estimators for P(S_n - n mu > x sqrt(n g(log n))), analytic
// envelopes for bounded triangular arrays, and exhaustive checkers for the
// maximal inequalities used in the proofs.
#pragma once

#include "mdrate/rate.hpp"
#include "mdrate/scale.hpp"
#include "mdrate/simulate/engine.hpp"
#include "mdrate/simulate/estimate.hpp"
#include "mdrate/tails.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdrate {

struct RunOptions {
  std::uint64_t reps = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
};

// ---- truncation ----------------------------------------------------------

struct TruncationScheme {
  double n = 0.0;
  double delta_n = 0.0;      // max(g(log n)^(-1/4), n^(-1/8))
  double delta_hat_n = 0.0;  // delta_n v g(log n)^(-1/2)
  double c_n = 0.0;          // delta_hat_n sqrt(n / g(log n))
  double mu_n = 0.0;         // E(X 1{|X| <= c_n})
  double second_n = 0.0;     // E(X^2 1{|X| <= c_n})
  double p_n = 0.0;          // P(|X| > c_n)
};

// For a centered model; n >= 2.
TruncationScheme truncation_scheme(const TailModel& centered_model, const ScaleFunction& g,
                                   double n);

// ---- estimators ------------------------------------------------------------

// Plain Monte Carlo of the deviation event on the given side. n >= 2, reps >= 1000.
Estimate crude_mc(const TailModel& model, const ScaleFunction& g, std::int64_t n, double x,
                  const RunOptions& opt, Side side = Side::upper);

// Exponentially tilted estimate of P(sum V_i > (x - eps) a_n) where
// V = X 1{|X| <= c_n} - mu_n for the centered model. eps in [0, x].
Estimate tilted_mc_truncated(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                             double x, double eps, const RunOptions& opt);

// Tilted estimate under the conditional law of X given |X| <= c_n, recentred:
// P(sum U_i > target).
Estimate tilted_mc_conditional(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                               double x, double eps, const RunOptions& opt);

struct SplitEstimate {
  Estimate upper;  // tilted truncated term + n P(X > sqrt(n)/g(log n)), clipped at 1
  Estimate lower;  // conditional tilted term times (1 - p_n)^n
  TruncationScheme scheme;
  double eps = 0.0;
  double upper_target = 0.0;  // (x - eps) a_n
  double lower_target = 0.0;  // (x + eps) a_n
  double max_term = 0.0;      // n P(X > sqrt(n)/g(log n)), unclipped
};

// eps defaults to x/10 when not given; requires eps in (0, x).
SplitEstimate split_estimate(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                             double x, std::optional<double> eps, const RunOptions& opt);

// ---- bounded triangular arrays -------------------------------------------

// X_{n,i} = sign * M_n * B with a fair sign, B ~ Bernoulli(q_n), M_n = tau_n sqrt(n/g(log n)),
// tau_n = g(log n)^(-tau_power) and q_n = sigma2 / M_n^2, so E X = 0 and E X^2 = sigma2.
struct ArraySpec {
  double sigma2 = 1.0;
  double tau_power = 0.25;
};

struct ArrayRow {
  double tau_n;
  double m_n;  // bound on |X_{n,i}|
  double q_n;  // P(X_{n,i} != 0)
  double b_n;  // Var(sum X_{n,i}) = n sigma2
};

// Throws std::invalid_argument when tau_n does not decay or q_n > 1.
ArrayRow array_row(const ArraySpec& spec, const ScaleFunction& g, std::int64_t n);

// Estimates P(sum X_{n,i} > r sqrt(n g(log n))).
Estimate lemma34_mc(const ArraySpec& spec, const ScaleFunction& g, std::int64_t n, double r,
                    const RunOptions& opt);

// exp{-(x^2 / 2B)(1 - x M / 2B)}; requires x M <= B.
double kolmogorov_upper(double b_n, double m_n, double x_n);
// exp{-(x^2 / 2B)(1 - eps)}; eps in [0, 1).
double kolmogorov_lower(double b_n, double x_n, double eps);

// ---- exhaustive checks -----------------------------------------------------

// Integer-valued law with integer weights; P(value[i]) = weight[i] / sum(weights).
struct IntLaw {
  std::vector<int> values;
  std::vector<std::uint32_t> weights;
};

struct LevyResult {
  // First inequality: P(max_k (V_k + m(T_{k-1})) > t) <= 2 P(max_k T_k > t).
  double lhs_max;
  double rhs_max;
  bool pass_max;
  // Second inequality: P(max_k (T_k + m(T_n - T_k)) > t) <= 2 P(T_n > t).
  double lhs_sum;
  double rhs_sum;
  bool pass_sum;
};

// Medians are midpoints of the median interval. Support size <= 4, 1 <= n <= 6.
LevyResult levy_maximal_check(const IntLaw& law, int n, double t);

// Twice the midpoint median of T_k for k = 0..n, as exact integers.
std::vector<std::int64_t> doubled_medians(const IntLaw& law, int n);

struct MaxBoundResult {
  double lhs;  // (1 ^ n p) / 2
  double rhs;  // 1 - (1 - p)^n
  bool pass;
};
MaxBoundResult max_lower_bound_check(double p, std::int64_t n);

// ---- trajectories ----------------------------------------------------------

struct TrajectoryRow {
  Estimate est;
  double rate_limsup;
  double rate_liminf;
  std::string error;  // nonempty when the estimator failed at this n
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  double rate_limsup;
  double rate_liminf;
};

// Rate band (limsup, liminf) on the given side: sigma2 from the model, exponents
// from the tail on `grid`. NaN unless 0 < sigma2 < inf.
std::pair<double, double> rate_band(const TailModel& model, const ScaleFunction& g, double x,
                                    Side side = Side::upper, const GridSpec& grid = {});

// Runs the estimator at each n with seed mix_seed(seed ^ n). The split method
// contributes two rows per n (upper then conditional-lower). Sides other than
// upper are only available to the crude method.
Trajectory convergence_trajectory(const TailModel& model, const ScaleFunction& g, double x,
                                  const std::vector<std::int64_t>& n_grid, Method method,
                                  const RunOptions& opt, std::optional<double> eps = {},
                                  Side side = Side::upper, const GridSpec& band_grid = {});

}  // namespace mdrate
