#include "tilted_core.hpp"

#include "../detail.hpp"
#include "mdrate/kernels/kernels.hpp"
#include "mdrate/rng.hpp"
#include "mdrate/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdrate {
namespace detail {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Vose alias table over a probability vector.
struct Alias {
  std::vector<double> prob;
  std::vector<std::uint32_t> alias;

  explicit Alias(const std::vector<double>& q) : prob(q.size()), alias(q.size()) {
    const std::size_t k = q.size();
    std::vector<double> scaled(k);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
      scaled[i] = q[i] * static_cast<double>(k);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      prob[s] = scaled[s];
      alias[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) prob[i] = 1.0, alias[i] = i;
    for (auto i : small) prob[i] = 1.0, alias[i] = i;
  }

  std::uint32_t pick(double u) const {
    const double scaled = u * static_cast<double>(prob.size());
    auto j = static_cast<std::size_t>(scaled);
    if (j >= prob.size()) j = prob.size() - 1;
    return scaled - static_cast<double>(j) < prob[j] ? static_cast<std::uint32_t>(j) : alias[j];
  }
};

// log Z(theta) and the tilted mean.
std::pair<double, double> tilt_stats(const CellLaw& law, double theta) {
  double m = kNegInf;
  for (const auto& c : law.cells) m = std::max(m, std::log(c.prob) + theta * c.mid);
  double z = 0.0, first = 0.0;
  for (const auto& c : law.cells) {
    const double w = std::exp(std::log(c.prob) + theta * c.mid - m);
    z += w;
    first += w * c.mid;
  }
  return {m + std::log(z), first / z};
}

}  // namespace

CellLaw truncated_cells(const TailModel& model, double c, double mu, bool conditional,
                        double mu_cond) {
  const Law& law = model.law();
  const double shift = model.shift();
  CellLaw out;
  out.law = &law;
  const double centre = conditional ? mu_cond : mu;
  out.offset = shift - centre;

  double inside = 0.0;
  const auto atoms = law.atoms();
  if (!atoms.empty()) {
    for (const Atom& a : atoms) {
      const double x = a.value + shift;
      if (a.prob <= 0.0 || !(std::fabs(x) <= c)) continue;
      out.cells.push_back({a.prob, x - centre, true, false, 0.0, a.prob, x - centre, x - centre});
      inside += a.prob;
    }
  } else {
    const double width = 2.0 * c / kCells;
    for (int j = 0; j < kCells; ++j) {
      // Cells are symmetric about 0, so exactly half lie on each side.
      const double a = -c + width * j;
      const double b = j + 1 == kCells ? c : a + width;
      Cell cell{};
      cell.point = false;
      cell.right = j >= kCells / 2;
      if (cell.right) {
        cell.base = std::exp(law.log_sf(a - shift));
        cell.mass = cell.base - std::exp(law.log_sf(b - shift));
      } else {
        cell.base = std::exp(law.log_below(a - shift));
        cell.mass = std::exp(law.log_below(b - shift)) - cell.base;
      }
      if (!(cell.mass > 0.0)) continue;
      cell.prob = cell.mass;
      cell.mid = 0.5 * (a + b) - centre;
      cell.lo = a - centre;
      cell.hi = b - centre;
      inside += cell.mass;
      out.cells.push_back(cell);
    }
  }
  if (conditional) {
    if (!(inside > 0.0)) throw TiltFailure("no mass inside the truncation level");
    for (auto& cell : out.cells) cell.prob /= inside;
  } else if (inside < 1.0) {
    const double v = -mu;
    out.cells.push_back({1.0 - inside, v, true, false, 0.0, 1.0 - inside, v, v});
  }
  return out;
}

double solve_tilt(const CellLaw& law, double per_step_target) {
  double vmax = -std::numeric_limits<double>::infinity();
  for (const auto& c : law.cells) vmax = std::max(vmax, c.mid);
  if (per_step_target >= vmax)
    throw TiltFailure("tilting target is beyond the reachable range of the truncated law");
  if (tilt_stats(law, 0.0).second >= per_step_target) return 0.0;
  double lo = 0.0, hi = 1.0 / std::max(vmax, 1e-300);
  int guard = 0;
  while (tilt_stats(law, hi).second < per_step_target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw TiltFailure("tilting equation has no finite root");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tilt_stats(law, mid).second < per_step_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TiltResult tilted_probability(const CellLaw& law, std::int64_t n, double target,
                              std::uint64_t reps, std::uint64_t seed, std::uint8_t purpose,
                              unsigned workers) {
  const double theta = target > 0.0 ? solve_tilt(law, target / static_cast<double>(n)) : 0.0;
  const double log_z = tilt_stats(law, theta).first;

  std::vector<double> q(law.cells.size());
  for (std::size_t j = 0; j < q.size(); ++j)
    q[j] = std::exp(std::log(law.cells[j].prob) + theta * law.cells[j].mid - log_z);
  const double qsum = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= qsum;
  const Alias alias(q);
  const double n_log_z = static_cast<double>(n) * log_z;
  const auto& k = kernels::active();
  const Law& base = *law.law;

  struct Partial {
    LogSum w;
    std::uint64_t hits = 0;
  };
  auto parts = run_chunks<Partial>(reps, workers, [&](std::size_t chunk, std::uint64_t count) {
    const kernels::StreamKey key{seed, stream_id(static_cast<Purpose>(purpose), chunk)};
    std::vector<double> u(2 * static_cast<std::size_t>(n));
    Partial p;
    for (std::uint64_t r = 0; r < count; ++r) {
      k.uniforms(key, r * static_cast<std::uint64_t>(n), u);
      double sum = 0.0, sum_mid = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const Cell& c = law.cells[alias.pick(u[2 * i])];
        sum_mid += c.mid;
        if (c.point) {
          sum += c.mid;
          continue;
        }
        const double w = u[2 * i + 1];
        const double y = c.right ? base.isf(c.base - w * c.mass) : base.quantile(c.base + w * c.mass);
        sum += std::clamp(y + law.offset, c.lo, c.hi);
      }
      if (sum > target) {
        ++p.hits;
        p.w.add(n_log_z - theta * sum_mid);
      } else {
        p.w.add(kNegInf);
      }
    }
    return p;
  });

  LogSum total;
  std::uint64_t hits = 0;
  for (const auto& p : parts) {
    total.merge(p.w);
    hits += p.hits;
  }
  const double log_r = std::log(static_cast<double>(reps));
  TiltResult res{theta, kNegInf, 0.0, hits};
  if (hits == 0) return res;
  res.log_p = total.log_sum() - log_r;
  const double log_m2 = total.log_sum_sq() - log_r;
  const double rel_var = std::max(0.0, std::exp(log_m2 - 2.0 * res.log_p) - 1.0);
  res.rel_stderr = std::sqrt(rel_var / static_cast<double>(reps));
  return res;
}

}  // namespace detail

TruncationScheme truncation_scheme(const TailModel& model, const ScaleFunction& g, double n) {
  if (!(n >= 2.0)) throw std::invalid_argument("truncation_scheme: n must be >= 2");
  const double gl = g(std::log(n));
  if (!(gl > 0.0)) throw std::invalid_argument("truncation_scheme: g(log n) must be positive");
  TruncationScheme s;
  s.n = n;
  s.delta_n = std::max(std::pow(gl, -0.25), std::pow(n, -0.125));
  s.delta_hat_n = std::max(s.delta_n, 1.0 / std::sqrt(gl));
  s.c_n = truncation_level(g, n, s.delta_hat_n);
  const auto tm = truncated_moments(model, s.c_n);
  s.mu_n = tm.first;
  s.second_n = tm.second;
  s.p_n = tm.p_out;
  return s;
}

namespace {

TailModel centered_model(const TailModel& model) {
  if (!std::isfinite(model.mu()))
    throw std::invalid_argument("tilted estimators need a finite mean");
  return model.mu() == 0.0 ? model : model.centered();
}

void check_common(std::int64_t n, double x, double eps, const RunOptions& opt) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(x > 0.0)) throw std::invalid_argument("x must be positive");
  if (!(eps >= 0.0 && eps <= x)) throw std::invalid_argument("eps must lie in [0, x]");
  if (opt.reps < 1000) throw std::invalid_argument("reps must be >= 1000");
}

Estimate from_tilt(const detail::TiltResult& t, const ScaleFunction& g, std::int64_t n, double x,
                   Method m, const RunOptions& opt, double log_factor = 0.0) {
  Estimate e;
  e.n = n;
  e.x = x;
  e.method = m;
  e.reps = opt.reps;
  e.hits = t.hits;
  finish_estimate(e, g, t.log_p + log_factor, t.rel_stderr);
  return e;
}

}  // namespace

Estimate tilted_mc_truncated(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                             double x, double eps, const RunOptions& opt) {
  check_common(n, x, eps, opt);
  const TailModel m = centered_model(model);
  const auto scheme = truncation_scheme(m, g, static_cast<double>(n));
  const auto cells = detail::truncated_cells(m, scheme.c_n, scheme.mu_n, false, 0.0);
  const double target = scaled_threshold(g, x - eps, static_cast<double>(n));
  const auto t = detail::tilted_probability(cells, n, target, opt.reps, opt.seed,
                                            static_cast<std::uint8_t>(Purpose::tilted), opt.workers);
  return from_tilt(t, g, n, x, Method::tilted, opt);
}

Estimate tilted_mc_conditional(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                               double x, double eps, const RunOptions& opt) {
  check_common(n, x, eps, opt);
  const TailModel m = centered_model(model);
  const auto scheme = truncation_scheme(m, g, static_cast<double>(n));
  const double mu_cond = scheme.mu_n / (1.0 - scheme.p_n);
  const auto cells = detail::truncated_cells(m, scheme.c_n, scheme.mu_n, true, mu_cond);
  const double target = scaled_threshold(g, x + eps, static_cast<double>(n));
  const auto t = detail::tilted_probability(cells, n, target, opt.reps, opt.seed,
                                            static_cast<std::uint8_t>(Purpose::conditional),
                                            opt.workers);
  return from_tilt(t, g, n, x, Method::conditional_lower, opt);
}

SplitEstimate split_estimate(const TailModel& model, const ScaleFunction& g, std::int64_t n,
                             double x, std::optional<double> eps_in, const RunOptions& opt) {
  const double eps = eps_in.value_or(x / 10.0);
  if (!(eps > 0.0 && eps < x)) throw std::invalid_argument("split_estimate: eps must lie in (0, x)");
  const TailModel m = centered_model(model);
  const double nd = static_cast<double>(n);

  SplitEstimate s;
  s.eps = eps;
  s.scheme = truncation_scheme(m, g, nd);
  s.upper_target = scaled_threshold(g, x - eps, nd);
  s.lower_target = scaled_threshold(g, x + eps, nd);

  const double gl = g(std::log(nd));
  const double log_max_term = std::log(nd) + m.log_right(std::sqrt(nd) / gl);
  s.max_term = std::exp(log_max_term);

  Estimate up = tilted_mc_truncated(m, g, n, x, eps, opt);
  up.method = Method::split;
  const double tilted_stderr = up.stderr_p;
  double log_up = detail::logaddexp(up.log_p, log_max_term);
  if (log_up > 0.0) {
    log_up = 0.0;
    up.flags |= flag::clipped;
  }
  const double rel = log_up == -std::numeric_limits<double>::infinity()
                         ? 0.0
                         : tilted_stderr / std::exp(log_up);
  up.flags &= flag::clipped;
  finish_estimate(up, g, log_up, rel);
  if (s.max_term >= 1.0) up.flags |= flag::union_vacuous;
  if (nd * std::fabs(s.scheme.mu_n) > eps * std::sqrt(nd * gl)) up.flags |= flag::drift_invalid;
  s.upper = up;

  Estimate lo = tilted_mc_conditional(m, g, n, x, eps, opt);
  const double log_keep = nd * std::log1p(-s.scheme.p_n);
  if (lo.log_p > -std::numeric_limits<double>::infinity()) {
    const double rel_lo = lo.rel_stderr;
    finish_estimate(lo, g, lo.log_p + log_keep, rel_lo);
  }
  s.lower = lo;
  return s;
}

}  // namespace mdrate
