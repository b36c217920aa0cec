#include "../src/simulate/tilted_core.hpp"
#include "mdrate/simulate.hpp"
#include "mdrate/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace mdrate;

namespace {

const ScaleFunction kT = ScaleFunction::identity();

double log_binom_tail(int n, int k_min, double p) {
  double acc = -INFINITY;
  for (int k = k_min; k <= n; ++k) {
    const double lt = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * std::log(p) + (n - k) * std::log1p(-p);
    acc = acc == -INFINITY ? lt : std::max(acc, lt) + std::log1p(std::exp(-std::fabs(acc - lt)));
  }
  return acc;
}

// Exact P(sum X > t) for the sparse spike array: N ~ Bin(n, q) nonzero terms,
// K of them positive with K | N ~ Bin(N, 1/2); sum = m (2K - N).
double log_spike_tail(std::int64_t n, double q, double m, double t) {
  double acc = -INFINITY;
  const double nd = static_cast<double>(n);
  const int n_max = static_cast<int>(std::min<double>(nd, nd * q + 60.0 * std::sqrt(nd * q) + 60));
  for (int big = 0; big <= n_max; ++big) {
    const double lp_n = std::lgamma(nd + 1) - std::lgamma(big + 1.0) - std::lgamma(nd - big + 1) +
                        big * std::log(q) + (nd - big) * std::log1p(-q);
    // smallest K with m (2K - N) > t
    int k_min = static_cast<int>(std::floor((t / m + big) / 2.0)) + 1;
    k_min = std::max(k_min, 0);
    if (k_min > big) continue;
    const double lt = lp_n + log_binom_tail(big, k_min, 0.5);
    acc = acc == -INFINITY ? lt : std::max(acc, lt) + std::log1p(std::exp(-std::fabs(acc - lt)));
  }
  return acc;
}

bool within(double a, double b, double sa, double sb, double k = 4.0) {
  return std::fabs(a - b) <= k * std::sqrt(sa * sa + sb * sb);
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : {Method::crude, Method::tilted, Method::split, Method::conditional_lower})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("fast"), std::invalid_argument);
  CHECK(flags_text(flag::zero_hits | flag::clipped) == "zero_hits|clipped");
}

TEST_CASE("crude: bounded support gives exactly zero") {
  // n = 2, threshold sqrt(2 log 2) * 2 > 2 = max |S_2|.
  const auto e = crude_mc(make_two_point(), kT, 2, 2.0, {2000, 5, 1});
  CHECK(e.p_hat == 0.0);
  CHECK(e.normalized == -INFINITY);
  CHECK((e.flags & flag::zero_hits));
  CHECK((e.flags & flag::low_count));
}

TEST_CASE("crude: Gaussian against the normal tail") {
  const auto e = crude_mc(make_gaussian(), kT, 100, 1.0, {100000, 11, 1});
  const double z = std::sqrt(std::log(100.0));
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  CHECK(p == doctest::Approx(0.01591).epsilon(1e-3));
  CHECK(std::fabs(e.p_hat - p) <= 4.0 * e.stderr_p);
  CHECK(e.stderr_p == doctest::Approx(std::sqrt(e.p_hat * (1 - e.p_hat) / 1e5)));
  CHECK(e.normalized == doctest::Approx(std::log(e.p_hat) / std::log(100.0)));

  const auto lower = crude_mc(make_gaussian(), kT, 100, 1.0, {100000, 11, 1}, Side::lower);
  CHECK(std::fabs(lower.p_hat - p) <= 4.0 * lower.stderr_p);
  const auto both = crude_mc(make_gaussian(), kT, 100, 1.0, {100000, 11, 1}, Side::two_sided);
  CHECK(std::fabs(both.p_hat - 2 * p) <= 4.0 * both.stderr_p);
}

TEST_CASE("crude: identical across worker counts") {
  const auto a = crude_mc(make_pareto(3.0).centered(), kT, 50, 1.0, {20000, 3, 1});
  const auto b = crude_mc(make_pareto(3.0).centered(), kT, 50, 1.0, {20000, 3, 4});
  CHECK(a.hits == b.hits);
  CHECK(a.p_hat == b.p_hat);
}

TEST_CASE("tilt root solves the mean equation") {
  const auto m = make_two_point();
  const auto cells = detail::truncated_cells(m, 10.0, 0.0, false, 0.0);
  CHECK(cells.cells.size() == 2);
  // Tilted mean of +-1 is tanh(theta).
  CHECK(detail::solve_tilt(cells, 0.4) == doctest::Approx(std::atanh(0.4)).epsilon(1e-9));
  CHECK(detail::solve_tilt(cells, -0.1) == 0.0);
  CHECK_THROWS_AS(detail::solve_tilt(cells, 1.0), detail::TiltFailure);
}

TEST_CASE("tilted: two-point n=30 matches the binomial tail") {
  // S_30 = 2K - 30 > 12 iff K >= 22.
  const double exact = std::exp(log_binom_tail(30, 22, 0.5));
  const auto cells = detail::truncated_cells(make_two_point(), 100.0, 0.0, false, 0.0);
  const auto t = detail::tilted_probability(cells, 30, 12.0, 20000, 17, 3, 1);
  const double p = std::exp(t.log_p);
  CHECK(std::fabs(p - exact) <= 4.0 * p * t.rel_stderr);
  CHECK(t.rel_stderr < 0.05);
}

TEST_CASE("tilted: zero target reduces to untilted sampling") {
  const auto cells = detail::truncated_cells(make_two_point(), 100.0, 0.0, false, 0.0);
  const auto t = detail::tilted_probability(cells, 31, 0.0, 20000, 2, 3, 1);
  CHECK(t.theta == 0.0);
  CHECK(std::exp(t.log_p) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("tilted: Gaussian truncated sum against direct sampling") {
  const auto m = make_gaussian();
  const auto scheme = truncation_scheme(m, kT, 100.0);
  CHECK(scheme.c_n == doctest::Approx(scheme.delta_hat_n * std::sqrt(100.0 / std::log(100.0))));
  CHECK(scheme.p_n == doctest::Approx(std::erfc(scheme.c_n / std::sqrt(2.0))).epsilon(1e-6));
  CHECK(std::fabs(scheme.mu_n) < 1e-12);

  // Direct: V = X 1{|X| <= c} - mu_n from plain draws.
  const double target = scaled_threshold(kT, 1.0, 100.0);
  const auto draws = sample(m, 99, 100 * 20000);
  double hits = 0;
  for (int r = 0; r < 20000; ++r) {
    double s = 0;
    for (int i = 0; i < 100; ++i) {
      const double x = draws[r * 100 + i];
      s += (std::fabs(x) <= scheme.c_n ? x : 0.0) - scheme.mu_n;
    }
    hits += s > target;
  }
  const double p_direct = hits / 20000.0;
  const auto e = tilted_mc_truncated(m, kT, 100, 1.0, 0.0, {20000, 4, 1});
  CHECK(within(e.p_hat, p_direct, e.stderr_p, std::sqrt(p_direct * (1 - p_direct) / 20000)));
  CHECK(e.method == Method::tilted);
}

TEST_CASE("truncation scheme: quadrature against sampling") {
  const auto m = make_pareto(3.0).centered();
  const auto s = truncation_scheme(m, kT, 1e4);
  const auto draws = sample(m, 8, 1000000);
  double first = 0, out = 0, sq = 0;
  for (double x : draws) {
    const double v = std::fabs(x) <= s.c_n ? x : 0.0;
    first += v;
    sq += v * v;
    out += std::fabs(x) > s.c_n;
  }
  const double nd = static_cast<double>(draws.size());
  const double mean = first / nd;
  const double se = std::sqrt((sq / nd - mean * mean) / nd);
  CHECK(std::fabs(mean - s.mu_n) <= 4.0 * se);
  const double p = out / nd;
  CHECK(std::fabs(p - s.p_n) <= 4.0 * std::sqrt(s.p_n * (1 - s.p_n) / nd));
  CHECK(s.delta_hat_n >= s.delta_n);
  CHECK(s.delta_n == doctest::Approx(std::max(std::pow(std::log(1e4), -0.25), std::pow(1e4, -0.125))));
}

TEST_CASE("split: bounded model inside the truncation window") {
  // +-1 lies inside (-c_n, c_n): p_n = 0, mu_n = 0, max term 0.
  const auto s = split_estimate(make_two_point(), kT, 400, 1.0, 0.05, {20000, 6, 1});
  CHECK(s.scheme.p_n == 0.0);
  CHECK(s.scheme.mu_n == 0.0);
  CHECK(s.max_term == 0.0);
  CHECK(s.lower.p_hat <= s.upper.p_hat);
  const auto crude = crude_mc(make_two_point(), kT, 400, 1.0, {20000, 6, 1});
  CHECK(within(s.lower.p_hat, crude.p_hat, s.lower.stderr_p, crude.stderr_p, 8.0));
  CHECK(within(s.upper.p_hat, crude.p_hat, s.upper.stderr_p, crude.stderr_p, 8.0));
}

TEST_CASE("split: Pareto max term is vacuous at n = 1e4") {
  const auto m = make_pareto(3.0).centered();
  const auto s = split_estimate(m, kT, 10000, 5.0, std::nullopt, {4000, 7, 1});
  CHECK(s.eps == doctest::Approx(0.5));
  // sqrt(n)/log n ~ 10.86 in centered units; the uncentered tail is (t + 1.5)^-3.
  const double edge = 100.0 / std::log(1e4);
  CHECK(edge == doctest::Approx(10.857).epsilon(1e-3));
  CHECK(s.max_term == doctest::Approx(1e4 * std::pow(edge + 1.5, -3.0)).epsilon(1e-9));
  CHECK(s.max_term > 1.0);
  CHECK(s.upper.p_hat == 1.0);
  CHECK((s.upper.flags & flag::union_vacuous));
  CHECK((s.upper.flags & flag::clipped));
  CHECK(s.lower.p_hat < s.upper.p_hat);
  CHECK_THROWS_AS(split_estimate(m, kT, 10000, 5.0, 5.0, {4000, 7, 1}), std::invalid_argument);
}

TEST_CASE("Kolmogorov envelopes") {
  CHECK(kolmogorov_upper(1.0, 0.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(kolmogorov_upper(100.0, 1.0, 20.0) == doctest::Approx(std::exp(-1.8)));
  CHECK(kolmogorov_upper(10.0, 2.0, 5.0) == doctest::Approx(std::exp(-25.0 / 20.0 * 0.5)));
  CHECK_THROWS_AS(kolmogorov_upper(10.0, 2.1, 5.0), std::invalid_argument);
  CHECK(kolmogorov_lower(1.0, 2.0, 0.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(kolmogorov_lower(1.0, 2.0, 0.5) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("lemma34: spike array against the exact trinomial tail") {
  const ArraySpec spec;
  for (std::int64_t n : {1000, 10000}) {
    const auto row = array_row(spec, kT, n);
    CHECK(row.q_n * row.m_n * row.m_n == doctest::Approx(1.0));
    CHECK(row.m_n <= row.tau_n * std::sqrt(n / std::log(double(n))) * (1 + 1e-15));
    const double r = std::sqrt(2.0);
    const double x_n = scaled_threshold(kT, r, double(n));
    const double exact = log_spike_tail(n, row.q_n, row.m_n, x_n);
    const auto e = lemma34_mc(spec, kT, n, r, {20000, 21, 1});
    CHECK(std::fabs(e.p_hat - std::exp(exact)) <= 4.0 * e.stderr_p);
    CHECK(std::log(e.p_hat) <= std::log(kolmogorov_upper(row.b_n, row.m_n, x_n)));
    if (n == 10000) CHECK(std::fabs(e.normalized + 1.0) < 0.3);
  }
  // Small r: the symmetric sum exceeds r a_n with probability near P(S > 0).
  const auto row = array_row(spec, kT, 1000);
  const double exact0 = std::exp(log_spike_tail(1000, row.q_n, row.m_n, 1e-6));
  const auto e0 = lemma34_mc(spec, kT, 1000, 1e-9, {20000, 2, 1});
  CHECK(std::fabs(e0.p_hat - exact0) <= 4.0 * e0.stderr_p);
  CHECK(exact0 < 0.5);
  CHECK(exact0 > 0.45);
  CHECK_THROWS_AS(array_row({1.0, 0.0}, kT, 1000), std::invalid_argument);
  CHECK_THROWS_AS(array_row({1e6, 0.25}, kT, 1000), std::invalid_argument);
}

TEST_CASE("Levy: medians use the interval midpoint") {
  const IntLaw sym{{-1, 1}, {1, 1}};
  const auto med = doubled_medians(sym, 3);
  CHECK(med == std::vector<std::int64_t>{0, 0, 0, 0});
  // Asymmetric: P(+1) = 0.7; T_1 median is 1.
  const IntLaw asym{{-1, 1}, {3, 7}};
  CHECK(doubled_medians(asym, 1)[1] == 2);
  // Mirror law gives negated medians.
  const IntLaw mirror{{1, -1}, {3, 7}};
  const auto ma = doubled_medians(asym, 5), mm = doubled_medians(mirror, 5);
  for (int k = 0; k <= 5; ++k) CHECK(ma[k] == -mm[k]);
}

TEST_CASE("Levy: hand cases") {
  const IntLaw sym{{-1, 1}, {1, 1}};
  const auto one = levy_maximal_check(sym, 1, 0.0);
  CHECK(one.lhs_max == 0.5);
  CHECK(one.rhs_max == 0.5);
  CHECK(one.lhs_sum == 0.5);
  CHECK(one.rhs_sum == 0.5);
  const auto r4 = levy_maximal_check(sym, 4, 0.0);
  CHECK(r4.pass_max);
  CHECK(r4.pass_sum);
  CHECK(r4.rhs_sum == 5.0 / 16.0);  // T_4 in {2, 4}
  CHECK(r4.rhs_max == 10.0 / 16.0);
  const auto r5 = levy_maximal_check({{-1, 1}, {3, 7}}, 5, 1.5);
  CHECK(r5.pass_max);
  CHECK(r5.pass_sum);
  CHECK_THROWS_AS(levy_maximal_check({{1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}}, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(levy_maximal_check(sym, 7, 0.0), std::invalid_argument);
}

TEST_CASE("max lower bound boundaries") {
  CHECK(max_lower_bound_check(0.0, 17).pass);
  CHECK(max_lower_bound_check(0.0, 17).lhs == 0.0);
  const auto r = max_lower_bound_check(1.0, 1);
  CHECK(r.lhs == 0.5);
  CHECK(r.rhs == 1.0);
  CHECK(r.pass);
}

TEST_CASE("trajectory: seeds per n, band, and failure rows") {
  const auto tr = convergence_trajectory(make_gaussian(), kT, std::sqrt(2.0), {100, 1000}, Method::crude,
                                         {2000, 1, 1});
  REQUIRE(tr.rows.size() == 2);
  CHECK(tr.rate_limsup == doctest::Approx(-1.0));
  CHECK(tr.rate_liminf == doctest::Approx(-1.0));
  const auto direct = crude_mc(make_gaussian(), kT, 1000, std::sqrt(2.0), RunOptions{2000, mix_seed(1 ^ 1000), 1});
  CHECK(tr.rows[1].est.hits == direct.hits);
  CHECK_THROWS_AS(convergence_trajectory(make_gaussian(), kT, 1.0, {1000, 100}, Method::crude, {2000, 1, 1}),
                  std::invalid_argument);
  const auto sp = convergence_trajectory(make_two_point(), kT, 1.0, {100}, Method::split, {2000, 1, 1});
  CHECK(sp.rows.size() == 2);
  CHECK(sp.rows[0].est.method == Method::split);
  CHECK(sp.rows[1].est.method == Method::conditional_lower);
  // Tilt target beyond n c_n: recorded, not thrown.
  const auto bad = convergence_trajectory(make_two_point(), kT, 40.0, {100}, Method::tilted, {2000, 1, 1});
  REQUIRE(bad.rows.size() == 1);
  CHECK((bad.rows[0].est.flags & flag::tilt_failed));
  CHECK(!bad.rows[0].error.empty());
}
