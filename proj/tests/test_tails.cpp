#include "doctest.h"
#include "mdrate/tails.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace mdrate;

namespace {

std::vector<TailModel> catalog() {
  const auto id = ScaleFunction::identity();
  return {make_gaussian(),
          make_gaussian(0.5, 2.0),
          make_two_point(),
          make_two_point(0.7),
          make_pareto(3.0),
          make_pareto(3.0).centered(),
          make_pareto(2.5),
          make_pareto(4.0),
          make_designed_tail(1.0, 1.0, id, std::exp(1.0)),
          make_designed_tail(0.5, 2.0, id, std::exp(1.0)),
          make_designed_tail(kInf, 1.0, id, std::exp(1.0)),
          make_designed_tail(1.0, 0.5, ScaleFunction::power(2.0), std::exp(1.0)),
          make_oscillating_tail(0.5, 2.0, id, 3.0)};
}

double design_ratio(const TailModel& m, const ScaleFunction& g, double t) {
  return -(2.0 * std::log(t) + m.log_right(t)) / g(std::log(t));
}

}  // namespace

TEST_CASE("survival closed forms") {
  CHECK(make_gaussian().survival(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(make_pareto(3.0).survival(10.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(make_pareto(3.0).survival(0.5) == 1.0);
  CHECK(make_two_point().survival(1.0) == 0.0);
  CHECK(make_two_point().survival(0.999) == 0.5);
  CHECK(make_two_point().left_tail(0.5) == 0.5);
  CHECK(make_two_point().left_tail(1.0) == 0.0);
  // Deep Gaussian tail in log space: log P(Z > 40).
  CHECK(make_gaussian().log_right(40.0) == doctest::Approx(-804.608442013754).epsilon(1e-12));
}

TEST_CASE("moments") {
  const auto tp = moments(make_two_point());
  CHECK(tp.mu == 0.0);
  CHECK(tp.sigma2 == 1.0);

  const auto par = moments(make_pareto(3.0));
  CHECK(par.mu == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(par.second == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(par.sigma2 == doctest::Approx(0.75).epsilon(1e-5));

  CHECK(std::isinf(moments(make_pareto(1.5)).sigma2));
  CHECK(std::isinf(make_pareto(1.5).sigma2()));
  CHECK(make_pareto(1.5).mu() == doctest::Approx(3.0));

  const auto gs = moments(make_gaussian(0.5, 2.0));
  CHECK(gs.mu == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(gs.sigma2 == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("TailModel invariants over the catalog") {
  for (const auto& m : catalog()) {
    INFO(m.label());
    double prev_r = 1.0, prev_l = 1.0;
    for (double t = 0.0; t < 1e6; t = t * 1.3 + 0.01) {
      const double r = m.survival(t), l = m.left_tail(t);
      CHECK(r <= prev_r);
      CHECK(l <= prev_l);
      CHECK(r >= 0.0);
      CHECK(r + l <= 1.0 + 1e-15);
      prev_r = r;
      prev_l = l;
    }
    CHECK(m.survival(1e12) + m.left_tail(1e12) < 1e-6);

    // Tonelli: E X^2 from tail integration agrees with the recorded moments.
    if (std::isfinite(m.sigma2())) {
      const auto q = moments(m);
      CHECK(std::fabs(q.second - (m.sigma2() + m.mu() * m.mu())) <=
            0.005 * (m.sigma2() + m.mu() * m.mu()));
    }
  }
}

TEST_CASE("sampler agreement at probe points") {
  for (const auto& m : catalog()) {
    INFO(m.label());
    const auto xs = sample(m, 20240611, 1000000);
    for (double probe : {-1.5, -0.2, 0.0, 0.7, 2.0, 5.0}) {
      const double p = m.survival(probe);
      double hits = 0.0;
      for (double x : xs) hits += x > probe;
      const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / xs.size());
      CHECK(std::fabs(hits / xs.size() - p) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("sample determinism and plain moments") {
  const auto tp = make_two_point();
  const auto a = sample(tp, 99, 1000000);
  const auto b = sample(tp, 99, 1000000);
  CHECK(a == b);
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= a.size();
  CHECK(std::fabs(mean) <= 4.0 / 1000.0);

  const auto pa = sample(make_pareto(3.0), 5, 1000000);
  double hits = 0.0;
  for (double x : pa) hits += x > 10.0;
  CHECK(std::fabs(hits / 1e6 - 1e-3) <= 4.0 * std::sqrt(1e-3 / 1e6));
}

TEST_CASE("designed tail") {
  const auto id = ScaleFunction::identity();
  const auto m = make_designed_tail(1.0, 1.0, id, std::exp(1.0));
  REQUIRE(m.design());
  CHECK(m.design()->lam_plus == 1.0);
  CHECK(m.mu() == 0.0);
  // Symmetric design: the centering shift is zero up to quadrature error, so the tail is t^-3.
  CHECK(std::fabs(m.shift()) < 1e-9);
  for (double t : {10.0, 1e3, 1e6})
    CHECK(m.survival(t) == doctest::Approx(std::pow(t, -3.0)).epsilon(1e-6));
  CHECK(m.survival(0.0) == doctest::Approx(0.5).epsilon(1e-9));

  // Designed-tail oracle converges monotonically in deviation.
  for (auto [lp, g] : {std::pair{0.5, id}, std::pair{2.0, ScaleFunction::power(2.0)},
                       std::pair{1.0, ScaleFunction::t_log()}}) {
    const auto d = make_designed_tail(lp, 1.0, g, std::exp(1.0));
    double prev = kInf;
    for (double t : {1e6, 1e8, 1e10}) {
      const double dev = std::fabs(design_ratio(d, g, t) - lp);
      CHECK(dev <= prev + 1e-3);
      prev = dev;
    }
    CHECK(prev < 1e-3);
  }

  CHECK_THROWS_AS(make_designed_tail(0.0, 1.0, id, std::exp(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_designed_tail(1.0, 1.0, ScaleFunction::log_clamped(), std::exp(1.0)),
                  std::invalid_argument);
  CHECK_NOTHROW(make_designed_tail(1.5, 2.0, ScaleFunction::log_clamped(), std::exp(1.0)));
  CHECK_THROWS_AS(make_designed_tail(1.0, 1.0, id, 1.0), std::invalid_argument);
}

TEST_CASE("designed tail quantile inverts survival") {
  const auto m = make_designed_tail(0.5, 2.0, ScaleFunction::identity(), std::exp(1.0));
  for (double u : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-9}) {
    const double x = m.quantile(u);
    CHECK(1.0 - m.survival(x) == doctest::Approx(u).epsilon(1e-8));
  }
  for (double s : {1e-15, 1e-8, 1e-3}) {
    const double y = m.law().isf(s);
    CHECK(std::exp(m.law().log_sf(y)) == doctest::Approx(s).epsilon(1e-8));
  }
}

TEST_CASE("oscillating tail") {
  const auto g = ScaleFunction::identity();
  const auto m = make_oscillating_tail(0.5, 2.0, g, 3.0);
  REQUIRE(m.design());
  const auto& d = *m.design();
  REQUIRE(d.peaks.size() >= 4);
  CHECK(d.peaks[0] == doctest::Approx(1.0));
  CHECK(d.troughs[0] == doctest::Approx(4.0));
  CHECK(d.peaks[1] == doctest::Approx(12.0));
  CHECK(d.troughs[1] == doctest::Approx(48.0));
  CHECK(d.peaks[2] == doctest::Approx(144.0));

  // Block endpoints alternate between the two targets.
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(design_ratio(m, g, std::exp(d.peaks[k])) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(design_ratio(m, g, std::exp(d.troughs[k])) == doctest::Approx(0.5).epsilon(0.05));
  }
  // h/g never leaves [lo, hi] on the tail.
  for (double u = 1.5; u < 700.0; u *= 1.01) {
    const double r = design_ratio(m, g, std::exp(u));
    CHECK(r >= 0.5 - 1e-6);
    CHECK(r <= 2.0 + 1e-6);
  }
  CHECK(std::isfinite(m.sigma2()));
  CHECK_THROWS_AS(make_oscillating_tail(2.0, 2.0, g, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(make_oscillating_tail(2.0, 0.5, g, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(make_oscillating_tail(0.5, 2.0, g, 1.0), std::invalid_argument);
}

TEST_CASE("oscillating degenerates toward the designed tail") {
  const auto g = ScaleFunction::identity();
  const auto m = make_oscillating_tail(1.0 - 1e-9, 1.0, g, 3.0);
  const auto d = make_designed_tail(1.0, 1.0, g, std::exp(1.0));
  for (double t : {1e2, 1e5, 1e10})
    CHECK(m.log_right(t) == doctest::Approx(d.log_right(t)).epsilon(1e-6));
}

TEST_CASE("truncated moments") {
  const auto p = make_pareto(3.0).centered();
  const double c = 18.9;
  const auto tm = truncated_moments(p, c);
  // Closed form for X = P - 1.5: E(X 1{X <= c}) = -E(X 1{X > c}) = -(1.5 (c+1.5)^-2 + ... )
  const double b = c + 1.5;
  const double tail_first = 1.5 * std::pow(b, -2.0) - 1.5 * std::pow(b, -3.0);
  CHECK(tm.first == doctest::Approx(-tail_first).epsilon(1e-8));
  CHECK(tm.p_out == doctest::Approx(std::pow(b, -3.0)).epsilon(1e-12));

  const auto tp = truncated_moments(make_two_point(), 2.0);
  CHECK(tp.first == 0.0);
  CHECK(tp.second == 1.0);
  CHECK(tp.p_out == 0.0);
  const auto tq = truncated_moments(make_two_point(0.7, -1.0, 3.0), 2.0);
  CHECK(tq.first == doctest::Approx(-0.3));
  CHECK(tq.p_out == doctest::Approx(0.7));
}
