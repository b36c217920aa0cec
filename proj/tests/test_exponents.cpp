#include "doctest.h"
#include "mdrate/exponents.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace mdrate;

namespace {

const GridSpec kGrid{1e4, 1e10, 60, GridSpacing::geometric};
const GridSpec kLogLog{std::exp(1.0), std::exp(700.0), 60, GridSpacing::loglog};

struct Case {
  TailModel model;
  ScaleFunction g;
  GridSpec grid;
};

std::vector<Case> catalog() {
  const auto id = ScaleFunction::identity();
  const auto sq = ScaleFunction::power(2.0);
  const double e = std::exp(1.0);
  return {
      {make_gaussian(), id, kGrid},
      {make_two_point(), id, kGrid},
      {make_two_point(0.7, -1.0, 3.0), sq, kGrid},
      {make_pareto(3.0), id, kGrid},
      {make_pareto(3.0).centered(), id, kGrid},
      {make_pareto(2.5), id, kGrid},
      {make_pareto(4.0), id, kGrid},
      {make_designed_tail(1.0, 1.0, id, e), id, kGrid},
      {make_designed_tail(0.5, 2.0, id, e), id, kGrid},
      {make_designed_tail(2.0, 0.5, sq, e), sq, kGrid},
      {make_designed_tail(kInf, 1.0, id, e), id, kGrid},
      {make_designed_tail(1.0, 1.0, ScaleFunction::t_log(), e), ScaleFunction::t_log(), kGrid},
      {make_oscillating_tail(0.5, 2.0, id, 3.0), id, kLogLog},
  };
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("grid spec") {
  const auto t = kGrid.values();
  CHECK(t.size() == 60);
  CHECK(t.front() == 1e4);
  CHECK(t.back() == 1e10);
  const auto u = kLogLog.values();
  CHECK(std::log(u[1]) / std::log(u[0]) == doctest::Approx(std::log(u[59]) / std::log(u[58])));
  CHECK_THROWS_AS(validate_grid({1e4, 1e10, 59}, ScaleFunction::identity()), std::invalid_argument);
  CHECK_THROWS_AS(validate_grid({1e4, 1e9, 60}, ScaleFunction::identity()), std::invalid_argument);
  CHECK_THROWS_AS(validate_grid({1.5, 1e9, 60}, ScaleFunction::log_clamped()), std::invalid_argument);
}

TEST_CASE("exponents_from_tail closed forms") {
  const auto id = ScaleFunction::identity();
  auto e = exponents_from_tail(make_pareto(3.0), id, kGrid);
  CHECK(e.lam1_bar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.lam1_under == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(e.lam2_bar));
  CHECK(std::isinf(e.lam2_under));
  CHECK(e.lam_bar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.lam_under == doctest::Approx(1.0).epsilon(1e-12));

  e = exponents_from_tail(make_two_point(), ScaleFunction::power(0.5), kGrid);
  CHECK(e == TailExponents{kInf, kInf, kInf, kInf, kInf, kInf});
  e = exponents_from_tail(make_gaussian(), id, kGrid);
  CHECK(e == TailExponents{kInf, kInf, kInf, kInf, kInf, kInf});

  e = exponents_from_tail(make_designed_tail(0.5, 2.0, id, std::exp(1.0)), id, kGrid);
  CHECK(rel(e.lam1_bar, 0.5) < 0.05);
  CHECK(rel(e.lam1_under, 0.5) < 0.05);
  CHECK(rel(e.lam2_bar, 2.0) < 0.05);
  CHECK(rel(e.lam2_under, 2.0) < 0.05);
  CHECK(rel(e.lam_bar, 0.5) < 0.05);
  CHECK(rel(e.lam_under, 0.5) < 0.05);

  // Gaussian right tail encodes an infinite exponent.
  e = exponents_from_tail(make_designed_tail(kInf, 1.0, id, std::exp(1.0)), id, kGrid);
  CHECK(std::isinf(e.lam1_bar));
  CHECK(rel(e.lam2_bar, 1.0) < 0.01);

  // Infinite variance clips to 0.
  e = exponents_from_tail(make_pareto(1.5), id, kGrid);
  CHECK(e.lam1_bar == 0.0);
}

TEST_CASE("Pareto alpha gives lam1 = alpha - 2 for g = t") {
  for (double alpha : {2.5, 3.0, 4.0}) {
    const auto e = exponents_from_tail(make_pareto(alpha), ScaleFunction::identity(), kGrid);
    CHECK(rel(e.lam1_bar, alpha - 2.0) < 0.02);
    CHECK(rel(e.lam1_under, alpha - 2.0) < 0.02);
    const auto c = exponents_from_tail(make_pareto(alpha).centered(), ScaleFunction::identity(), kGrid);
    CHECK(rel(c.lam1_bar, alpha - 2.0) < 0.02);
  }
}

TEST_CASE("catalog invariants and sup-form agreement") {
  const auto r_grid = default_r_grid();
  for (const auto& c : catalog()) {
    INFO(c.model.label());
    const auto e = exponents_from_tail(c.model, c.g, c.grid);
    CHECK(well_ordered(e));
    // min identity and one-sided inequality, within 2%.
    const double m = std::min(e.lam1_bar, e.lam2_bar);
    if (std::isinf(m)) {
      CHECK(std::isinf(e.lam_bar));
    } else {
      CHECK(std::fabs(e.lam_bar - m) <= 0.02 * m + 1e-12);
    }
    const double mu = std::min(e.lam1_under, e.lam2_under);
    CHECK(e.lam_under <= mu * 1.02 + 1e-12);

    const auto s = exponents_sup_form(c.model, c.g, r_grid, c.grid);
    CHECK(well_ordered(s));
    const double step = 0.05 + 1e-12;
    const double a[] = {e.lam1_bar, e.lam1_under, e.lam2_bar, e.lam2_under, e.lam_bar, e.lam_under};
    const double b[] = {s.lam1_bar, s.lam1_under, s.lam2_bar, s.lam2_under, s.lam_bar, s.lam_under};
    for (int i = 0; i < 6; ++i) {
      if (std::isinf(a[i])) {
        CHECK(std::isinf(b[i]));
      } else {
        CHECK(std::fabs(a[i] - b[i]) <= step);
      }
    }
  }
}

TEST_CASE("sup form on the oscillating tail") {
  const auto g = ScaleFunction::identity();
  const auto s = exponents_sup_form(make_oscillating_tail(0.5, 2.0, g, 3.0), g, default_r_grid(), kLogLog);
  CHECK(s.lam1_bar == doctest::Approx(0.5).epsilon(0.1));
  CHECK(s.lam1_under == doctest::Approx(2.0).epsilon(0.1));
  CHECK(exponents_sup_form(make_pareto(3.0), g, default_r_grid(), kGrid).lam1_bar ==
        doctest::Approx(0.95).epsilon(1e-9));
  const std::vector<double> short_r = {0.0, 1.0};
  CHECK_THROWS_AS(exponents_sup_form(make_pareto(3.0), g, short_r, kGrid), std::invalid_argument);
}

TEST_CASE("oscillating tail exponents") {
  const auto g = ScaleFunction::identity();
  const auto e = exponents_from_tail(make_oscillating_tail(0.5, 2.0, g, 3.0), g, kLogLog);
  CHECK(rel(e.lam_bar, 0.5) < 0.1);
  CHECK(rel(e.lam_under, 2.0) < 0.1);
  CHECK(rel(e.lam1_bar, 0.5) < 0.1);
  CHECK(rel(e.lam2_under, 2.0) < 0.1);
}

TEST_CASE("lemma33 predictions") {
  TailExponents e{1.0, 1.0, kInf, kInf, 1.0, 1.0};
  auto p = lemma33_predictions(e, 1.0);
  CHECK(p.sqrt_ng_limsup == -0.5);
  CHECK(p.sqrt_n_over_g_liminf == -0.5);
  e.lam1_bar = kInf;
  e.lam1_under = kInf;
  CHECK(lemma33_predictions(e, 1.0).sqrt_ng_limsup == -kInf);
  e.lam1_bar = 2.0;
  CHECK(lemma33_predictions(e, 0.0).sqrt_ng_limsup == -2.0);

  // Finite-n values on a designed tail approach the prediction.
  const auto g = ScaleFunction::identity();
  const auto m = make_designed_tail(1.0, 1.0, g, std::exp(1.0));
  double prev_a = kInf, prev_b = kInf;
  for (double n : {1e10, 1e30, 1e100, 1e300}) {
    const double da = std::fabs(lemma33_sqrt_ng(m, g, 1.0, n) + 0.5);
    const double db = std::fabs(lemma33_sqrt_n_over_g(m, g, 1.0, n) + 0.5);
    CHECK(da <= prev_a);
    CHECK(db <= prev_b);
    prev_a = da;
    prev_b = db;
  }
  CHECK(prev_a < 0.03);
  CHECK(prev_b < 0.03);
}

TEST_CASE("empirical exponents") {
  const auto g = ScaleFunction::identity();
  auto xs = sample(make_pareto(3.0), 11, 1000000);
  auto r = empirical_exponents(xs, g);
  CHECK(r.exps.lam1_bar >= 0.6);
  CHECK(r.exps.lam1_under <= 1.4);
  CHECK(std::isinf(r.exps.lam2_bar));
  CHECK_FALSE(r.low_support);

  xs = sample(make_designed_tail(0.5, 2.0, g, std::exp(1.0)), 12, 1000000);
  r = empirical_exponents(xs, g);
  CHECK(r.exps.lam1_bar >= 0.3);
  CHECK(r.exps.lam1_under <= 0.8);

  xs = sample(make_two_point(), 13, 200000);
  r = empirical_exponents(xs, g);
  CHECK(std::isinf(r.exps.lam1_bar));
  CHECK(r.low_support);

  CHECK_THROWS_AS(empirical_exponents(std::vector<double>(10, 1.0), g), std::invalid_argument);
}
