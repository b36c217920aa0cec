#include "tilted_core.hpp"

#include "mdrate/rng.hpp"
#include "mdrate/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace mdrate {

ArrayRow array_row(const ArraySpec& spec, const ScaleFunction& g, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("array_row: n must be >= 2");
  if (!(spec.sigma2 > 0.0) || !std::isfinite(spec.sigma2))
    throw std::invalid_argument("array_row: sigma2 must be positive and finite");
  if (!(spec.tau_power > 0.0))
    throw std::invalid_argument("array_row: tau_n = g(log n)^(-tau_power) must decay to 0");
  const double nd = static_cast<double>(n);
  const double gl = g(std::log(nd));
  if (!(gl > 1.0)) throw std::invalid_argument("array_row: g(log n) must exceed 1");
  ArrayRow row;
  row.tau_n = std::pow(gl, -spec.tau_power);
  row.m_n = row.tau_n * std::sqrt(nd / gl);
  row.q_n = spec.sigma2 / (row.m_n * row.m_n);
  if (row.q_n > 1.0)
    throw std::invalid_argument("array_row: bound tau_n sqrt(n/g) is below sigma; n too small");
  row.b_n = nd * spec.sigma2;
  return row;
}

Estimate lemma34_mc(const ArraySpec& spec, const ScaleFunction& g, std::int64_t n, double r,
                    const RunOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("lemma34_mc: r must be positive");
  if (opt.reps < 1000) throw std::invalid_argument("lemma34_mc: reps must be >= 1000");
  const ArrayRow row = array_row(spec, g, n);
  detail::CellLaw law;
  auto point = [](double p, double v) { return detail::Cell{p, v, true, false, 0.0, p, v, v}; };
  law.cells = {point(row.q_n / 2.0, -row.m_n), point(row.q_n / 2.0, row.m_n)};
  if (row.q_n < 1.0) law.cells.push_back(point(1.0 - row.q_n, 0.0));
  const double target = scaled_threshold(g, r, static_cast<double>(n));
  const auto t = detail::tilted_probability(law, n, target, opt.reps, opt.seed,
                                            static_cast<std::uint8_t>(Purpose::lemma34), opt.workers);
  Estimate e;
  e.n = n;
  e.x = r;
  e.method = Method::tilted;
  e.reps = opt.reps;
  e.hits = t.hits;
  finish_estimate(e, g, t.log_p, t.rel_stderr);
  return e;
}

double kolmogorov_upper(double b_n, double m_n, double x_n) {
  if (!(b_n > 0.0) || !(m_n >= 0.0) || !(x_n > 0.0))
    throw std::invalid_argument("kolmogorov_upper: need B > 0, M >= 0, x > 0");
  if (x_n * m_n > b_n) throw std::invalid_argument("kolmogorov_upper: requires x M <= B");
  return std::exp(-(x_n * x_n / (2.0 * b_n)) * (1.0 - x_n * m_n / (2.0 * b_n)));
}

double kolmogorov_lower(double b_n, double x_n, double eps) {
  if (!(b_n > 0.0) || !(x_n > 0.0)) throw std::invalid_argument("kolmogorov_lower: need B, x > 0");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("kolmogorov_lower: eps in [0, 1)");
  return std::exp(-(x_n * x_n / (2.0 * b_n)) * (1.0 - eps));
}

MaxBoundResult max_lower_bound_check(double p, std::int64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("max_lower_bound_check: p in [0, 1]");
  if (n < 1) throw std::invalid_argument("max_lower_bound_check: n >= 1");
  const double nd = static_cast<double>(n);
  MaxBoundResult r;
  r.lhs = std::min(1.0, nd * p) / 2.0;
  r.rhs = p == 1.0 ? 1.0 : -std::expm1(nd * std::log1p(-p));
  r.pass = r.lhs <= r.rhs;
  return r;
}

}  // namespace mdrate
