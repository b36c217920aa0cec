#include "../detail.hpp"
#include "mdrate/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace mdrate {
namespace {

const GridSpec kGrid{1e4, 1e10, 60, GridSpacing::geometric};
const GridSpec kLogLog{std::exp(1.0), std::exp(700.0), 60, GridSpacing::loglog};

template <typename F>
CriterionResult timed(const std::string& id, double budget_s, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r{id, false, {}, 0.0};
  std::ostringstream detail;
  try {
    r.pass = body(detail);
  } catch (const std::exception& e) {
    r.pass = false;
    detail << " exception: " << e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > budget_s) {
    r.pass = false;
    detail << " over time budget " << budget_s << "s";
  }
  r.detail = detail.str();
  return r;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool close_rel(double got, double want, double tol) {
  if (std::isinf(want)) return std::isinf(got) && (got > 0) == (want > 0);
  return std::fabs(got - want) <= tol * std::fabs(want);
}

// Regime implied by the limits of log P / g(log n).
Regime regime_from_limits(double sup, double inf) {
  if (sup == -kInf) return Regime::MINUS_INFINITY;
  if (sup == 0.0 && inf == 0.0) return Regime::LIMIT_ZERO;
  if (sup == 0.0) return Regime::MIXED;
  if (inf == 0.0) return Regime::BOUNDED_NONZERO_LIMSUP;
  return Regime::BOUNDED_NONZERO_LIMINF_TOO;
}

// Limits of log P(|S_n - n eta| > x a_n) / g(log n): the probability tends to 1
// when E X != eta or the variance is infinite, is eventually 0 for a
// degenerate X = eta, and follows the two-sided rate otherwise.
std::pair<double, double> two_sided_limits(double sigma2, bool match, const TailExponents& e,
                                           double rho, double x) {
  if (!match || std::isinf(sigma2)) return {0.0, 0.0};
  if (sigma2 == 0.0) return {-kInf, -kInf};
  const RateSpec spec{sigma2, rho, e};
  return {rate_limsup(spec, x, Side::two_sided), rate_liminf(spec, x, Side::two_sided)};
}

}  // namespace

std::vector<CatalogEntry> catalog() {
  const auto id = ScaleFunction::identity();
  const auto sq = ScaleFunction::power(2.0);
  const double e = std::exp(1.0);
  return {
      {"gaussian", make_gaussian(), id, kGrid},
      {"two-point", make_two_point(), id, kGrid},
      {"two-point skew, g=t^2", make_two_point(0.7, -1.0, 3.0), sq, kGrid},
      {"pareto 3", make_pareto(3.0), id, kGrid},
      {"pareto 3 centered", make_pareto(3.0).centered(), id, kGrid},
      {"pareto 2.5", make_pareto(2.5), id, kGrid},
      {"pareto 4", make_pareto(4.0), id, kGrid},
      {"designed (1,1)", make_designed_tail(1.0, 1.0, id, e), id, kGrid},
      {"designed (0.5,2)", make_designed_tail(0.5, 2.0, id, e), id, kGrid},
      {"designed (2,0.5), g=t^2", make_designed_tail(2.0, 0.5, sq, e), sq, kGrid},
      {"designed (inf,1)", make_designed_tail(kInf, 1.0, id, e), id, kGrid},
      {"designed (1,1), g=t log t", make_designed_tail(1.0, 1.0, ScaleFunction::t_log(), e),
       ScaleFunction::t_log(), kGrid},
      {"oscillating (0.5,2)", make_oscillating_tail(0.5, 2.0, id, 3.0), id, kLogLog},
  };
}

CriterionResult check_a1_exponent_recovery() {
  return timed("A1", 10.0, [](std::ostream& d) {
    int cases = 0, bad = 0;
    double worst = 0.0;
    for (const auto& g : {ScaleFunction::identity(), ScaleFunction::power(2.0)}) {
      for (double lp : {0.5, 1.0, 2.0}) {
        for (double lm : {0.5, 1.0, 2.0}) {
          const auto m = make_designed_tail(lp, lm, g, std::exp(1.0));
          const auto e = exponents_from_tail(m, g, kGrid);
          const double want[] = {lp, lp, lm, lm, std::min(lp, lm), std::min(lp, lm)};
          const double got[] = {e.lam1_bar, e.lam1_under, e.lam2_bar,
                                e.lam2_under, e.lam_bar,  e.lam_under};
          bool ok = true;
          for (int i = 0; i < 6; ++i) {
            worst = std::max(worst, std::fabs(got[i] - want[i]) / want[i]);
            ok &= close_rel(got[i], want[i], 0.05);
          }
          ok &= close_rel(e.lam_bar, std::min(e.lam1_bar, e.lam2_bar), 0.02);
          ++cases;
          if (!ok) {
            ++bad;
            d << " miss(" << g.label() << "," << lp << "," << lm << ")";
          }
        }
      }
    }
    d << cases << " designed tails, worst relative error " << num(worst);
    return bad == 0;
  });
}

CriterionResult check_a2_sup_form() {
  return timed("A2", 30.0, [](std::ostream& d) {
    const auto r_grid = default_r_grid();
    int bad = 0;
    double worst = 0.0;
    const auto cat = catalog();
    for (const auto& c : cat) {
      const auto e = exponents_from_tail(c.model, c.g, c.grid);
      const auto s = exponents_sup_form(c.model, c.g, r_grid, c.grid);
      const double a[] = {e.lam1_bar, e.lam1_under, e.lam2_bar, e.lam2_under, e.lam_bar, e.lam_under};
      const double b[] = {s.lam1_bar, s.lam1_under, s.lam2_bar, s.lam2_under, s.lam_bar, s.lam_under};
      for (int i = 0; i < 6; ++i) {
        if (std::isinf(a[i]) || std::isinf(b[i])) {
          if (std::isinf(a[i]) != std::isinf(b[i])) ++bad, d << " inf-mismatch(" << c.name << ")";
          continue;
        }
        worst = std::max(worst, std::fabs(a[i] - b[i]));
        if (std::fabs(a[i] - b[i]) > 0.05 + 1e-12) ++bad, d << " gap(" << c.name << ")";
      }
    }
    d << cat.size() << " catalog models, largest gap " << num(worst) << " (step 0.05)";
    return bad == 0;
  });
}

CriterionResult check_a3_inequalities() {
  return timed("A3", 120.0, [](std::ostream& d) {
    std::vector<IntLaw> laws;
    for (int a = -3; a <= 3; ++a)
      for (int b = a + 1; b <= 3; ++b)
        for (std::uint32_t wa = 1; wa <= 4; ++wa)
          for (std::uint32_t wb = 1; wb <= 4; ++wb) laws.push_back({{a, b}, {wa, wb}});
    for (int a = -2; a <= 2; ++a)
      for (int b = a + 1; b <= 2; ++b)
        for (int c = b + 1; c <= 2; ++c)
          for (std::uint32_t wa = 1; wa <= 3; ++wa)
            for (std::uint32_t wb = 1; wb <= 3; ++wb)
              for (std::uint32_t wc = 1; wc <= 3; ++wc) laws.push_back({{a, b, c}, {wa, wb, wc}});
    long cases = 0, levy_fail = 0;
    for (const auto& law : laws) {
      int vmax = 0;
      for (int v : law.values) vmax = std::max(vmax, std::abs(v));
      for (int n = 1; n <= 5; ++n) {
        const double r = static_cast<double>(n * vmax);
        for (int j = 0; j <= 20; ++j) {
          const auto res = levy_maximal_check(law, n, -r + 2.0 * r * j / 20.0);
          ++cases;
          levy_fail += !(res.pass_max && res.pass_sum);
        }
      }
    }
    long grid = 0, max_fail = 0;
    for (int i = 0; i < 1000; ++i) {
      const double p = std::exp(std::log(1e-6) + (std::log(0.5) - std::log(1e-6)) * i / 999.0);
      for (std::int64_t n = 1; n <= 1000; ++n) {
        ++grid;
        max_fail += !max_lower_bound_check(p, n).pass;
      }
    }
    d << laws.size() << " laws, " << cases << " Levy cases, " << levy_fail << " failures; "
      << grid << " (p,n) cells, " << max_fail << " failures";
    return laws.size() >= 200 && levy_fail == 0 && max_fail == 0;
  });
}

CriterionResult check_a4_gaussian(unsigned workers) {
  return timed("A4", 300.0, [&](std::ostream& d) {
    const auto g = ScaleFunction::identity();
    const double x = std::sqrt(2.0);
    const std::int64_t grid[] = {100, 1000, 10000, 100000};
    double prev_gap = kInf, last = 0.0;
    bool approaching = true;
    d << "oracle normalized:";
    for (auto n : grid) {
      const double ln = std::log(static_cast<double>(n));
      const double v = detail::log_norm_sf(x * std::sqrt(ln)) / ln;
      const double gap = std::fabs(v + 1.0);
      approaching &= gap < prev_gap;
      prev_gap = gap;
      last = v;
      d << ' ' << num(v);
    }
    const bool near = std::fabs(last + 1.0) <= 0.25;
    const double p = std::exp(detail::log_norm_sf(x * std::sqrt(std::log(1000.0))));
    const auto e = crude_mc(make_gaussian(), g, 1000, x, {1000000, 2024, workers});
    const bool mc = std::fabs(e.p_hat - p) <= 4.0 * e.stderr_p;
    d << "; |v+1| at 1e5 " << num(std::fabs(last + 1.0)) << (near ? " ok" : " FAIL")
      << "; |v+1| strictly decreasing " << (approaching ? "yes" : "NO") << "; crude n=1e3 p="
      << num(e.p_hat) << " oracle " << num(p) << " z=" << num((e.p_hat - p) / e.stderr_p);
    return near && approaching && mc;
  });
}

CriterionResult check_a5_heavy_tail(unsigned workers) {
  return timed("A5", 300.0, [&](std::ostream& d) {
    const auto g = ScaleFunction::identity();
    const auto m = make_pareto(3.0).centered();
    const auto [lim, liminf] = rate_band(m, g, 5.0);
    const bool band = std::fabs(m.sigma2() - 0.75) < 1e-9 && std::fabs(lim + 0.5) < 0.02 &&
                      std::fabs(liminf + 0.5) < 0.02;
    const auto e = crude_mc(m, g, 10000, 5.0, {1000000, 2025, workers});
    const bool near = e.p_hat > 0.0 && std::fabs(e.normalized + 0.5) <= 0.25;
    const auto s = split_estimate(m, g, 10000, 5.0, std::nullopt, {10000, 2026, workers});
    const double lo_se = std::hypot(s.lower.stderr_p, e.stderr_p);
    const double hi_se = std::hypot(s.upper.stderr_p, e.stderr_p);
    const bool sandwich = s.lower.p_hat - 4.0 * lo_se <= e.p_hat && e.p_hat <= s.upper.p_hat + 4.0 * hi_se;
    d << "sigma2 " << num(m.sigma2()) << ", predicted " << num(lim) << "; crude p=" << num(e.p_hat)
      << " (" << e.hits << " hits) normalized " << num(e.normalized)
      << (near ? " ok" : " FAIL (needs |v+0.5| <= 0.25)") << "; split [" << num(s.lower.p_hat)
      << ", " << num(s.upper.p_hat) << "] " << flags_text(s.upper.flags)
      << (sandwich ? " brackets" : " does NOT bracket");
    return band && near && sandwich;
  });
}

CriterionResult check_a6_envelopes(unsigned workers) {
  return timed("A6", 120.0, [&](std::ostream& d) {
    const auto g = ScaleFunction::identity();
    const ArraySpec spec;
    const double r = std::sqrt(2.0 * spec.sigma2);
    bool ok = true;
    for (std::int64_t n : {1000, 10000}) {
      const auto row = array_row(spec, g, n);
      const double x_n = scaled_threshold(g, r, static_cast<double>(n));
      const auto e = lemma34_mc(spec, g, n, r, {50000, 34, workers});
      const double up = kolmogorov_upper(row.b_n, row.m_n, x_n);
      const bool under = e.p_hat <= up * (1.0 + 4.0 * e.rel_stderr);
      ok &= under;
      d << "n=" << n << " p=" << num(e.p_hat) << " K+=" << num(up) << (under ? "" : " EXCEEDS") << "; ";
      if (n == 10000) {
        const double gl = g(std::log(static_cast<double>(n)));
        const double floor = std::log(kolmogorov_lower(row.b_n, x_n, 0.01)) / gl - 0.3;
        const bool above = e.normalized >= floor;
        ok &= above;
        d << "normalized " << num(e.normalized) << " floor " << num(floor) << (above ? "" : " BELOW");
      }
    }
    return ok;
  });
}

CriterionResult check_a7_oscillation() {
  return timed("A7", 10.0, [](std::ostream& d) {
    const auto g = ScaleFunction::identity();
    const auto m = make_oscillating_tail(0.5, 2.0, g, 3.0);
    const auto e = exponents_from_tail(m, g, kLogLog);
    const bool exps = close_rel(e.lam_bar, 0.5, 0.1) && close_rel(e.lam_under, 2.0, 0.1);
    const RateSpec spec{m.sigma2(), g.rho(), e};
    const double hi = rate_limsup(spec, 10.0, Side::two_sided);
    const double lo = rate_liminf(spec, 10.0, Side::two_sided);
    d << "lam_bar " << num(e.lam_bar) << " lam_under " << num(e.lam_under) << "; band ["
      << num(lo) << ", " << num(hi) << "]";
    return exps && hi > lo;
  });
}

CriterionResult check_a8_classifier() {
  return timed("A8", 1.0, [](std::ostream& d) {
    int cells = 0, bad = 0;
    const double lams[] = {0.0, 0.5, kInf};
    for (double s2 : {0.0, 0.5, 1.0, 4.0}) {
      for (bool match : {true, false}) {
        for (double b : lams) {
          for (double u : lams) {
            if (u < b) continue;  // lam_bar <= lam_under by definition
            for (double rho : {0.0, 1.0, 2.0}) {
              const TailExponents e{b, u, b, u, b, u};
              const auto [sup, inf] = two_sided_limits(s2, match, e, rho, 1.0);
              ++cells;
              if (classify(s2, match, e, rho) != regime_from_limits(sup, inf)) ++bad;
            }
          }
        }
      }
    }
    const auto g = ScaleFunction::identity();
    struct Preset {
      const char* name;
      TailModel model;
      Regime want;
    };
    const Preset presets[] = {
        {"mean-shift", make_gaussian(1.0, 1.0), Regime::LIMIT_ZERO},
        {"pareto 1.5", make_pareto(1.5), Regime::LIMIT_ZERO},
        {"constant", make_constant(0.0), Regime::MINUS_INFINITY},
    };
    bool presets_ok = true;
    for (const auto& p : presets) {
      const bool match = std::fabs(p.model.mu()) < 1e-12;  // eta = 0
      const auto e = exponents_from_tail(p.model, g, kGrid);
      const auto got = classify(p.model.sigma2(), match, e, g.rho());
      presets_ok &= got == p.want;
      d << p.name << "->" << regime_name(got) << "; ";
    }
    d << cells << " grid cells, " << bad << " disagreements";
    return bad == 0 && presets_ok;
  });
}

CriterionResult check_a9_determinism() {
  return timed("A9", 600.0, [](std::ostream& d) {
    ExperimentConfig gauss;
    gauss.name = "a9-gaussian";
    gauss.model = {"gaussian", {}, false};
    gauss.method = Method::crude;
    gauss.x = {std::sqrt(2.0)};
    gauss.n_grid = {100, 1000};
    gauss.reps = 20000;
    gauss.seed = 9;
    ExperimentConfig split = gauss;
    split.name = "a9-pareto-split";
    split.model = {"pareto", {{"alpha", 3.0}}, true};
    split.method = Method::split;
    split.x = {5.0};
    split.reps = 4000;
    bool ok = true;
    for (auto cfg : {gauss, split}) {
      cfg.workers = 1;
      const auto base = trajectory_csv(cfg);
      ok &= trajectory_csv(cfg) == base;
      for (unsigned w : {4u, 8u}) {
        cfg.workers = w;
        const bool same = trajectory_csv(cfg) == base;
        ok &= same;
        if (!same) d << cfg.name << " differs at " << w << " workers; ";
      }
      d << cfg.name << " " << base.size() << " bytes; ";
    }
    d << (ok ? "byte-identical under 1/4/8 workers" : "MISMATCH");
    return ok;
  });
}

std::vector<CriterionResult> verify_suite(const std::string& suite) {
  std::vector<CriterionResult> out;
  const bool all = suite == "all";
  if (suite == "acceptance") {
    out = {check_a1_exponent_recovery(), check_a2_sup_form(), check_a3_inequalities(),
           check_a4_gaussian(),          check_a5_heavy_tail(), check_a6_envelopes(),
           check_a7_oscillation(),       check_a8_classifier(), check_a9_determinism()};
    return out;
  }
  if (!all && suite != "inequalities" && suite != "exponents" && suite != "envelopes")
    throw ConfigError("unknown suite '" + suite + "' (inequalities, exponents, envelopes, all, acceptance)");
  if (all || suite == "exponents") {
    out.push_back(check_a1_exponent_recovery());
    out.push_back(check_a2_sup_form());
    out.push_back(check_a7_oscillation());
    out.push_back(check_a8_classifier());
  }
  if (all || suite == "inequalities") out.push_back(check_a3_inequalities());
  if (all || suite == "envelopes") out.push_back(check_a6_envelopes());
  return out;
}

void print_results(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    char head[64];
    std::snprintf(head, sizeof head, "%-4s %s %7.2fs  ", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                  r.seconds);
    os << head << r.detail << '\n';
  }
}

}  // namespace mdrate
