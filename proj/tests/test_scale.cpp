#include "doctest.h"
#include "mdrate/scale.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace mdrate;

namespace {

std::vector<ScaleFunction> catalog() {
  return {ScaleFunction::identity(), ScaleFunction::log_clamped(), ScaleFunction::power(0.5),
          ScaleFunction::power(2.0), ScaleFunction::t_log(), ScaleFunction::power_log_correction(2.0)};
}

}  // namespace

TEST_CASE("eval on presets") {
  CHECK(eval(ScaleFunction::identity(), 7.0) == 7.0);
  CHECK(eval(ScaleFunction::log_clamped(), 1.0) == 0.0);
  CHECK(eval(ScaleFunction::log_clamped(), 0.2) == 0.0);
  const double e4 = std::exp(4.0);
  CHECK(eval(ScaleFunction::power_log_correction(2.0), e4) ==
        doctest::Approx(e4 * e4 * (1.0 + 1.0 / 4.0)).epsilon(1e-14));
  CHECK(eval(ScaleFunction::t_log(), 0.5) == doctest::Approx(0.5));
  CHECK(ScaleFunction::power(0.5).rho() == 0.5);
  CHECK(ScaleFunction::log_clamped().rho() == 0.0);
}

TEST_CASE("presets are nondecreasing and divergent") {
  for (const auto& g : catalog()) {
    double prev = g(0.0);
    for (double t = 0.0; t < 1e6; t = t * 1.07 + 0.01) {
      const double v = g(t);
      CHECK_MESSAGE(v >= prev, g.label());
      prev = v;
    }
    CHECK(g(1e300) > 100.0);
  }
}

TEST_CASE("inverse") {
  for (const auto& g : catalog()) {
    for (double y : {0.5, 1.0, 3.0, 40.0}) {
      const double u = g.inverse(y);
      CHECK(g(u) == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("check_regular_variation") {
  const std::vector<double> two = {2.0};
  auto r = check_regular_variation(ScaleFunction::identity(), two, 1e6, 1e-12);
  CHECK(r.entries[0].deviation == 0.0);
  CHECK(r.pass);

  r = check_regular_variation(ScaleFunction::log_clamped(), two, 1e8, 0.05);
  CHECK(r.entries[0].deviation == doctest::Approx(std::log(2.0) / std::log(1e8)).epsilon(1e-12));
  CHECK(r.pass);

  // t log t at x = 3 deviates by 3 log 3 / log t, which is 0.179 at t = 1e8.
  const std::vector<double> three = {3.0};
  r = check_regular_variation(ScaleFunction::t_log(), three, 1e8, 0.1);
  CHECK(r.entries[0].deviation == doctest::Approx(3.0 * std::log(3.0) / std::log(1e8)).epsilon(1e-9));
  CHECK_FALSE(r.pass);
  r = check_regular_variation(ScaleFunction::t_log(), three, 1e16, 0.1);
  CHECK(r.pass);

  CHECK_THROWS_AS(check_regular_variation(ScaleFunction::log_clamped(), two, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_regular_variation(ScaleFunction::identity(), {}, 10.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("regular-variation deviation shrinks with t_max") {
  const std::vector<double> xs = {0.5, 2.0, 3.0, 10.0};
  for (const auto& g : catalog()) {
    const auto a = check_regular_variation(g, xs, 1e6, 1.0);
    const auto b = check_regular_variation(g, xs, 1e12, 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
      CHECK_MESSAGE(b.entries[i].deviation <= a.entries[i].deviation + 1e-6, g.label());
  }
}

TEST_CASE("scaled_threshold and truncation_level") {
  const auto id = ScaleFunction::identity();
  const double e2 = std::exp(2.0);
  CHECK(scaled_threshold(id, 1.0, e2) == doctest::Approx(std::numbers::e * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(scaled_threshold(id, 2.0, 100.0) == doctest::Approx(42.9193).epsilon(1e-5));
  CHECK(truncation_level(id, std::numbers::e, 0.3) == doctest::Approx(0.3 * std::sqrt(std::numbers::e)));
  CHECK(truncation_level(id, 1e4, 0.5) == doctest::Approx(16.476).epsilon(1e-4));

  // Clamp boundary: delta_hat = 1/sqrt(g(log n)) gives sqrt(n)/g(log n).
  const double n = 5000.0, gl = std::log(n);
  CHECK(truncation_level(id, n, 1.0 / std::sqrt(gl)) == doctest::Approx(std::sqrt(n) / gl).epsilon(1e-14));

  CHECK_THROWS_AS(scaled_threshold(ScaleFunction::log_clamped(), 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(truncation_level(ScaleFunction::log_clamped(), 2.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scaled_threshold(id, 1.0, 1.0), std::invalid_argument);

  CHECK(scaled_threshold(id, 1.0, 101.0) > scaled_threshold(id, 1.0, 100.0));
  CHECK(scaled_threshold(id, 1.1, 100.0) > scaled_threshold(id, 1.0, 100.0));
}

TEST_CASE("threshold / truncation identity") {
  for (const auto& g : catalog()) {
    for (double n : {20.0, 1e3, 1e6}) {
      for (double s : {0.3, 2.0}) {
        const double dh = 0.7;
        const double lhs = scaled_threshold(g, s, n) / (n * truncation_level(g, n, dh));
        const double rhs = s / (dh * n) * g(std::log(n));
        CHECK(std::fabs(lhs / rhs - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("half_index_limit") {
  const auto id = ScaleFunction::identity();
  auto r = half_index_limit(id, 1.0, 1e8);
  CHECK(r.predicted == 0.5);
  const double lt = std::log(1e8);
  CHECK(r.ratio == doctest::Approx((0.5 * lt + 0.5 * std::log(lt)) / lt).epsilon(1e-12));
  // The log log t / log t correction keeps the ratio near 0.58 at 1e8.
  CHECK(r.ratio == doctest::Approx(0.5790816).epsilon(1e-5));

  r = half_index_limit(ScaleFunction::log_clamped(), 1.0, 1e8);
  CHECK(r.predicted == 1.0);
  CHECK(r.ratio == doctest::Approx(0.7814574).epsilon(1e-5));

  CHECK(half_index_limit(ScaleFunction::power(2.0), 1.0, 1e8).predicted == 0.25);
  CHECK_THROWS_AS(half_index_limit(id, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("half_index ratio moves toward 2^-rho") {
  // For s < 1 the log s offset can carry the ratio across the limit, so the
  // monotone gap is only asserted for s >= 1.
  for (const auto& g : catalog()) {
    for (double s : {1.0, 3.0}) {
      const auto a = half_index_limit(g, s, 1e6);
      const auto b = half_index_limit(g, s, 1e10);
      CHECK_MESSAGE(std::fabs(b.ratio - b.predicted) <= std::fabs(a.ratio - a.predicted) + 1e-6,
                    g.label());
    }
  }
}
