// Exponential tilting over a cell partition of a bounded summand law.
//
// The summand law is cut into cells: atoms for discrete laws, equal-width
// intervals otherwise, plus an optional point mass. The proposal picks cell j
// with probability p_j e^{theta v_j} / Z, where v_j is the cell midpoint, and
// then draws exactly from the target law restricted to the cell. The weight
// Z^n e^{-theta sum v_j} is therefore exact, so the estimator is unbiased for
// any theta; theta only controls variance.
#pragma once

#include "mdrate/tails.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mdrate::detail {

struct TiltFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Cell {
  double prob;     // target probability of the cell
  double mid;      // representative value used in the tilt
  bool point;      // value is exactly `mid`
  bool right;      // continuous cell in the right half: sample by isf
  double base;     // S(a) for right cells, F(a) for left cells, in law coordinates
  double mass;     // unnormalised law mass of the cell
  double lo, hi;   // cell bounds in summand coordinates
};

struct CellLaw {
  std::vector<Cell> cells;
  const Law* law = nullptr;
  double offset = 0.0;  // summand = law value + offset
};

inline constexpr int kCells = 2048;

// V = X 1{|X| <= c} - mu for X = Y + shift. With conditional = true the law of
// X given |X| <= c, recentred by its own mean mu_cond, is used instead and the
// point mass at -mu is dropped.
CellLaw truncated_cells(const TailModel& model, double c, double mu, bool conditional,
                        double mu_cond);

struct TiltResult {
  double theta;
  double log_p;
  double rel_stderr;
  std::uint64_t hits;
};

// Solves for the tilt whose mean equals target / n and estimates P(sum > target).
// Throws TiltFailure when target / n is at or beyond the largest cell value.
TiltResult tilted_probability(const CellLaw& law, std::int64_t n, double target,
                              std::uint64_t reps, std::uint64_t seed, std::uint8_t purpose,
                              unsigned workers);

// Root of the tilted mean equation, exposed for tests.
double solve_tilt(const CellLaw& law, double per_step_target);

}  // namespace mdrate::detail
