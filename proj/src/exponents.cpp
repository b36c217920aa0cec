#include "mdrate/exponents.hpp"

#include "detail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdrate {

bool well_ordered(const TailExponents& e) {
  auto ok = [](double b, double u) { return b >= 0.0 && u >= 0.0 && b <= u; };
  return ok(e.lam1_bar, e.lam1_under) && ok(e.lam2_bar, e.lam2_under) &&
         ok(e.lam_bar, e.lam_under);
}

std::vector<double> GridSpec::values() const {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    if (spacing == GridSpacing::geometric) {
      t[i] = std::exp(std::log(t_min) + f * (std::log(t_max) - std::log(t_min)));
    } else {
      const double a = std::log(std::log(t_min)), b = std::log(std::log(t_max));
      t[i] = std::exp(std::exp(a + f * (b - a)));
    }
  }
  t.front() = t_min;
  t.back() = t_max;
  return t;
}

void validate_grid(const GridSpec& grid, const ScaleFunction& g) {
  if (!(grid.t_min > 1.0) || !(grid.t_max > grid.t_min) || !std::isfinite(grid.t_max))
    throw std::invalid_argument("grid needs 1 < t_min < t_max < inf");
  if (grid.points < 60) throw std::invalid_argument("grid needs at least 60 points");
  if (std::log10(grid.t_max / grid.t_min) < 6.0 - 1e-9)
    throw std::invalid_argument("grid must span at least 6 decades");
  if (!(g(std::log(grid.t_min)) > 0.0))
    throw std::invalid_argument("g(log t) must be positive on the grid");
}

namespace {

double log_tail(const TailModel& m, TailSide side, double t) {
  switch (side) {
    case TailSide::right: return m.log_right(t);
    case TailSide::left: return m.log_left(t);
    case TailSide::both: return m.log_abs(t);
  }
  return -kInf;
}

struct Profile {
  std::vector<double> a;   // log(t^2 tail(t)) on the window
  std::vector<double> gl;  // g(log t) on the window
  double a_anchor;
  double g_anchor;
};

Profile profile(const TailModel& m, const ScaleFunction& g, TailSide side, const GridSpec& grid) {
  validate_grid(grid, g);
  const auto t = grid.values();
  const std::size_t start = t.size() - t.size() / 3;
  Profile p;
  p.a_anchor = 2.0 * std::log(t.front()) + log_tail(m, side, t.front());
  p.g_anchor = g(std::log(t.front()));
  for (std::size_t i = start; i < t.size(); ++i) {
    p.a.push_back(2.0 * std::log(t[i]) + log_tail(m, side, t[i]));
    p.gl.push_back(g(std::log(t[i])));
  }
  return p;
}

double secant(double a, double a0, double gl, double g0) {
  if (a == -kInf) return kInf;
  const double s = -(a - a0) / (gl - g0);
  if (!(s <= kLambdaMax)) return kInf;
  return std::max(s, 0.0);
}

}  // namespace

ExponentPair exponent_pair(const TailModel& model, const ScaleFunction& g, TailSide side,
                           const GridSpec& grid) {
  const Profile p = profile(model, g, side, grid);
  if (p.a_anchor == -kInf) return {kInf, kInf};
  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    const double s = secant(p.a[i], p.a_anchor, p.gl[i], p.g_anchor);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

TailExponents exponents_from_tail(const TailModel& model, const ScaleFunction& g,
                                  const GridSpec& grid) {
  const auto r = exponent_pair(model, g, TailSide::right, grid);
  const auto l = exponent_pair(model, g, TailSide::left, grid);
  const auto b = exponent_pair(model, g, TailSide::both, grid);
  return {r.bar, r.under, l.bar, l.under, b.bar, b.under};
}

std::vector<double> default_r_grid() {
  std::vector<double> r;
  for (int i = 0; i <= 1000; ++i) r.push_back(0.05 * i);
  return r;
}

namespace {

ExponentPair sup_pair(const TailModel& m, const ScaleFunction& g, TailSide side,
                      std::span<const double> r_grid, const GridSpec& grid) {
  const Profile p = profile(m, g, side, grid);
  if (p.a_anchor == -kInf) return {kInf, kInf};
  // L_r(t) = log(t^2 e^{r g(log t)} tail(t)).
  auto below_anchor = [&](double r, std::size_t i) {
    return p.a[i] + r * p.gl[i] < p.a_anchor + r * p.g_anchor;
  };
  double bar = kInf, under = kInf;
  bool bar_done = false, under_done = false;
  double prev = 0.0;
  for (std::size_t k = 0; k < r_grid.size() && !(bar_done && under_done); ++k) {
    const double r = r_grid[k];
    bool all = true, any = false;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
      const bool b = below_anchor(r, i);
      all = all && b;
      any = any || b;
    }
    if (!bar_done && !all) {
      bar = k == 0 ? 0.0 : prev;
      bar_done = true;
    }
    if (!under_done && !any) {
      under = k == 0 ? 0.0 : prev;
      under_done = true;
    }
    prev = r;
  }
  return {bar, under};
}

}  // namespace

TailExponents exponents_sup_form(const TailModel& model, const ScaleFunction& g,
                                 std::span<const double> r_grid, const GridSpec& t_probe) {
  if (r_grid.empty() || r_grid.front() > 0.0 || r_grid.back() < kLambdaMax)
    throw std::invalid_argument("r_grid must cover [0, Lambda_max]");
  if (!std::is_sorted(r_grid.begin(), r_grid.end()))
    throw std::invalid_argument("r_grid must be increasing");
  const auto r = sup_pair(model, g, TailSide::right, r_grid, t_probe);
  const auto l = sup_pair(model, g, TailSide::left, r_grid, t_probe);
  const auto b = sup_pair(model, g, TailSide::both, r_grid, t_probe);
  return {r.bar, r.under, l.bar, l.under, b.bar, b.under};
}

Lemma33Predictions lemma33_predictions(const TailExponents& exps, double rho) {
  const double k = std::pow(2.0, rho);
  const double hi = -exps.lam1_bar / k, lo = -exps.lam1_under / k;
  return {hi, lo, hi, lo};
}

double lemma33_sqrt_ng(const TailModel& model, const ScaleFunction& g, double s, double n) {
  const double gl = g(std::log(n));
  return (std::log(n) + model.log_right(s * std::sqrt(n * gl))) / gl;
}

double lemma33_sqrt_n_over_g(const TailModel& model, const ScaleFunction& g, double s,
                             double n) {
  const double gl = g(std::log(n));
  return (std::log(n) + model.log_right(s * std::sqrt(n) / gl)) / gl;
}

EmpiricalExponents empirical_exponents(std::span<const double> sample, const ScaleFunction& g) {
  if (sample.size() < 100000) throw std::invalid_argument("empirical_exponents needs >= 1e5 draws");
  std::vector<double> pos, neg, abs;
  pos.reserve(sample.size());
  for (double x : sample) {
    if (x > 0.0) pos.push_back(x);
    if (x < 0.0) neg.push_back(-x);
    abs.push_back(std::fabs(x));
  }
  for (auto* v : {&pos, &neg, &abs}) std::sort(v->begin(), v->end());
  const double n = static_cast<double>(sample.size());

  EmpiricalExponents out{};
  out.t_lo = std::max(abs[static_cast<std::size_t>(0.9 * n)], 1.0 + 1e-9);
  out.t_hi = abs[abs.size() - 101];  // 100 draws lie strictly above
  // Count of strict exceedances of t in a sorted vector.
  auto count_above = [](const std::vector<double>& v, double t) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), t));
  };
  out.exceedances_at_top = static_cast<std::size_t>(count_above(abs, out.t_hi));
  out.low_support = out.exceedances_at_top < 100;
  if (!(out.t_hi > out.t_lo)) {
    out.exps = {kInf, kInf, kInf, kInf, kInf, kInf};
    out.low_support = true;
    return out;
  }

  constexpr int kPoints = 30;
  const std::size_t start = kPoints - kPoints / 3;
  auto pair = [&](const std::vector<double>& v) -> ExponentPair {
    const double t0 = out.t_lo;
    const double c0 = count_above(v, t0);
    if (c0 == 0.0) return {kInf, kInf};
    const double a0 = 2.0 * std::log(t0) + std::log(c0 / n);
    const double g0 = g(std::log(t0));
    double lo = kInf, hi = 0.0;
    for (int i = static_cast<int>(start); i < kPoints; ++i) {
      const double t = std::exp(std::log(out.t_lo) +
                                (std::log(out.t_hi) - std::log(out.t_lo)) * i / (kPoints - 1));
      const double c = count_above(v, t);
      const double a = c > 0.0 ? 2.0 * std::log(t) + std::log(c / n) : -kInf;
      const double s = secant(a, a0, g(std::log(t)), g0);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return {lo, hi};
  };
  const auto r = pair(pos), l = pair(neg), b = pair(abs);
  out.exps = {r.bar, r.under, l.bar, l.under, b.bar, b.under};
  return out;
}

}  // namespace mdrate
