#include "mdrate/tails.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace mdrate {

namespace {

constexpr double kCutoff = 1e12;
constexpr double kDivergenceShare = 0.01;

double integrate_panel(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  if (a >= 1.0) {
    // Log substitution keeps power-law integrands smooth across a decade.
    auto h = [&](double v) {
      const double t = std::exp(v);
      return f(t) * t;
    };
    return gauss_kronrod<double, 31>::integrate(h, std::log(a), std::log(b), 12, 1e-13);
  }
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

// Panel edges on [0, b]: decade marks from 1 and the given interior splits.
std::vector<double> panel_edges(double b, const std::vector<double>& splits) {
  std::vector<double> e = {0.0, b};
  for (double d = 1.0; d < b; d *= 10.0) e.push_back(d);
  for (double s : splits)
    if (s > 0.0 && s < b) e.push_back(s);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

struct Integral {
  double total = 0.0;
  double last_decade = 0.0;
};

Integral integrate_0_to(const std::function<double(double)>& f, double b,
                        const std::vector<double>& splits) {
  Integral out;
  const auto e = panel_edges(b, splits);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double part = integrate_panel(f, e[i], e[i + 1]);
    out.total += part;
    if (e[i] >= b / 10.0) out.last_decade += part;
  }
  return out;
}

std::vector<double> abs_splits(const Law& law, double shift) {
  std::vector<double> s;
  for (double b : law.breakpoints()) s.push_back(std::fabs(b + shift));
  return s;
}

}  // namespace

Moments moments_of_law(const Law& law, double shift) {
  const auto atoms = law.atoms();
  if (!atoms.empty()) {
    double m1 = 0.0, m2 = 0.0;
    for (const Atom& a : atoms) {
      const double x = a.value + shift;
      m1 += a.prob * x;
      m2 += a.prob * x * x;
    }
    double var = 0.0;
    for (const Atom& a : atoms) var += a.prob * (a.value + shift - m1) * (a.value + shift - m1);
    return {m1, var, m2};
  }
  auto right = [&](double t) { return std::exp(law.log_sf(t - shift)); };
  auto left = [&](double t) { return std::exp(law.log_below(-t - shift)); };
  const auto splits = abs_splits(law, shift);

  const Integral pos = integrate_0_to(right, kCutoff, splits);
  const Integral neg = integrate_0_to(left, kCutoff, splits);
  const Integral sec =
      integrate_0_to([&](double t) { return 2.0 * t * (right(t) + left(t)); }, kCutoff, splits);

  const bool mean_div = pos.last_decade > kDivergenceShare * pos.total ||
                        neg.last_decade > kDivergenceShare * neg.total;
  const bool second_div = sec.last_decade > kDivergenceShare * sec.total;
  double mu = pos.total - neg.total;
  if (mean_div) {
    const bool up = pos.last_decade > kDivergenceShare * pos.total;
    const bool down = neg.last_decade > kDivergenceShare * neg.total;
    mu = up && down ? std::nan("") : (up ? kInf : -kInf);
  }
  if (second_div || mean_div) return {mu, kInf, kInf};
  return {mu, sec.total - mu * mu, sec.total};
}

Moments moments(const TailModel& model) { return moments_of_law(model.law(), model.shift()); }

TruncatedMoments truncated_moments(const TailModel& model, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("truncation level must be positive");
  const Law& law = model.law();
  const double shift = model.shift();
  const auto atoms = law.atoms();
  if (!atoms.empty()) {
    TruncatedMoments t{0.0, 0.0, 0.0};
    for (const Atom& a : atoms) {
      const double x = a.value + shift;
      if (std::fabs(x) <= c) {
        t.first += a.prob * x;
        t.second += a.prob * x * x;
      } else {
        t.p_out += a.prob;
      }
    }
    return t;
  }
  const double sc = model.survival(c), lc = model.left_tail(c);
  auto right = [&](double x) { return model.survival(x) - sc; };
  auto left = [&](double x) { return model.left_tail(x) - lc; };
  const auto splits = abs_splits(law, shift);
  const double p1 = integrate_0_to(right, c, splits).total;
  const double n1 = integrate_0_to(left, c, splits).total;
  const double p2 = integrate_0_to([&](double x) { return 2.0 * x * right(x); }, c, splits).total;
  const double n2 = integrate_0_to([&](double x) { return 2.0 * x * left(x); }, c, splits).total;
  return {p1 - n1, p2 + n2, sc + lc};
}

}  // namespace mdrate
