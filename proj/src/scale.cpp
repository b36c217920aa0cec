#include "mdrate/scale.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdrate {

namespace {

std::string rho_text(double rho) {
  std::string s = std::to_string(rho);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

ScaleFunction ScaleFunction::power(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("power scale needs a finite rho > 0");
  return {ScaleKind::power, rho, rho == 1.0 ? "t" : "t^" + rho_text(rho)};
}

ScaleFunction ScaleFunction::log_clamped() { return {ScaleKind::log, 0.0, "log(t v 1)"}; }

ScaleFunction ScaleFunction::t_log() { return {ScaleKind::tlog, 1.0, "t*log(t v e)"}; }

ScaleFunction ScaleFunction::power_log_correction(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("power_logcorr scale needs a finite rho > 0");
  return {ScaleKind::power_logcorr, rho, "t^" + rho_text(rho) + "*(1+1/log(t v e))"};
}

double ScaleFunction::operator()(double t) const {
  if (t < 0.0) t = 0.0;
  switch (kind_) {
    case ScaleKind::power:
      return rho_ == 1.0 ? t : std::pow(t, rho_);
    case ScaleKind::log:
      return std::log(std::max(t, 1.0));
    case ScaleKind::tlog:
      return t * std::log(std::max(t, std::numbers::e));
    case ScaleKind::power_logcorr:
      return std::pow(t, rho_) * (1.0 + 1.0 / std::log(std::max(t, std::numbers::e)));
  }
  return 0.0;
}

double ScaleFunction::inverse(double y) const {
  if (y <= (*this)(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while ((*this)(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("scale inverse out of range");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < y ? lo : hi) = mid;
  }
  return hi;
}

RegularVariationReport check_regular_variation(const ScaleFunction& g,
                                               std::span<const double> x_grid, double t_max,
                                               double tol) {
  if (x_grid.empty()) throw std::invalid_argument("x_grid is empty");
  const double gt = g(t_max);
  if (!(gt > 0.0)) throw std::invalid_argument("g(t_max) must be positive");
  RegularVariationReport rep{t_max, tol, {}, 0.0, true};
  for (double x : x_grid) {
    if (!(x > 0.0)) throw std::invalid_argument("x_grid entries must be positive");
    const double ratio = g(x * t_max) / gt;
    const double target = std::pow(x, g.rho());
    const double dev = std::fabs(ratio - target);
    rep.entries.push_back({x, ratio, target, dev, dev <= tol});
    rep.max_deviation = std::max(rep.max_deviation, dev);
    rep.pass = rep.pass && dev <= tol;
  }
  return rep;
}

namespace {

double g_log_n(const ScaleFunction& g, double n) {
  if (!(n >= 2.0)) throw std::invalid_argument("n must be at least 2");
  const double v = g(std::log(n));
  if (!(v > 0.0)) throw std::invalid_argument("g(log n) must be positive");
  return v;
}

}  // namespace

double scaled_threshold(const ScaleFunction& g, double s, double n) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  return s * std::sqrt(n * g_log_n(g, n));
}

double truncation_level(const ScaleFunction& g, double n, double delta_hat) {
  if (!(delta_hat > 0.0)) throw std::invalid_argument("delta_hat must be positive");
  return delta_hat * std::sqrt(n / g_log_n(g, n));
}

double phi(const ScaleFunction& g, double s, double t) {
  return s * std::sqrt(t * g(std::log(std::max(t, std::numbers::e))));
}

HalfIndexResult half_index_limit(const ScaleFunction& g, double s, double t_max) {
  if (!(t_max > std::numbers::e)) throw std::invalid_argument("t_max must exceed e");
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  const double denom = g(std::log(t_max));
  if (!(denom > 0.0)) throw std::invalid_argument("g(log t_max) must be positive");
  return {g(std::log(phi(g, s, t_max))) / denom, std::pow(2.0, -g.rho())};
}

}  // namespace mdrate
