#include "mdrate/tails.hpp"

#include "detail.hpp"
#include "mdrate/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mdrate {

using detail::log1mexp;
using detail::logaddexp;

void Law::quantile_batch(std::span<double> u, const kernels::Table&) const {
  for (double& v : u) v = quantile(v);
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double std_normal_quantile(double u) {
  double z = 0.0;
  kernels::table(kernels::Isa::scalar).normal_quantile({&u, 1}, {&z, 1}, 0.0, 1.0);
  return z;
}

class GaussianLaw final : public Law {
 public:
  GaussianLaw(double mu, double sigma) : mu_(mu), sigma_(sigma) {}
  double log_sf(double y) const override { return detail::log_norm_sf((y - mu_) / sigma_); }
  double log_below(double y) const override { return detail::log_norm_sf((mu_ - y) / sigma_); }
  double quantile(double u) const override { return mu_ + sigma_ * std_normal_quantile(u); }
  double isf(double s) const override { return mu_ - sigma_ * std_normal_quantile(s); }
  void quantile_batch(std::span<double> u, const kernels::Table& k) const override {
    k.normal_quantile(u, u, mu_, sigma_);
  }
  std::vector<double> breakpoints() const override { return {mu_}; }

 private:
  double mu_, sigma_;
};

class ParetoLaw final : public Law {
 public:
  ParetoLaw(double alpha, double xm) : alpha_(alpha), xm_(xm) {}
  double log_sf(double y) const override {
    return y < xm_ ? 0.0 : -alpha_ * std::log(y / xm_);
  }
  double log_below(double y) const override {
    return y <= xm_ ? -kInf : log1mexp(log_sf(y));
  }
  double quantile(double u) const override {
    return xm_ * std::exp(-std::log1p(-u) / alpha_);
  }
  double isf(double s) const override { return s >= 1.0 ? xm_ : xm_ * std::pow(s, -1.0 / alpha_); }
  void quantile_batch(std::span<double> u, const kernels::Table& k) const override {
    k.pareto_quantile(u, u, xm_, alpha_);
  }
  std::vector<double> breakpoints() const override { return {xm_}; }

 private:
  double alpha_, xm_;
};

class DiscreteLaw final : public Law {
 public:
  explicit DiscreteLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  double log_sf(double y) const override {
    double p = 0.0;
    for (const Atom& a : atoms_)
      if (a.value > y) p += a.prob;
    return safe_log(std::min(p, 1.0));
  }
  double log_below(double y) const override {
    double p = 0.0;
    for (const Atom& a : atoms_)
      if (a.value < y) p += a.prob;
    return safe_log(std::min(p, 1.0));
  }
  double quantile(double u) const override {
    double cum = 0.0;
    for (const Atom& a : atoms_) {
      cum += a.prob;
      if (u <= cum) return a.value;
    }
    return atoms_.back().value;
  }
  double isf(double s) const override { return quantile(1.0 - s); }
  void quantile_batch(std::span<double> u, const kernels::Table& k) const override {
    if (atoms_.size() == 2) {
      k.two_point(u, u, atoms_[0].prob, atoms_[0].value, atoms_[1].value);
    } else if (atoms_.size() == 1) {
      std::fill(u.begin(), u.end(), atoms_[0].value);
    } else {
      Law::quantile_batch(u, k);
    }
  }
  std::vector<Atom> atoms() const override { return atoms_; }
  std::vector<double> breakpoints() const override {
    std::vector<double> b;
    for (const Atom& a : atoms_) b.push_back(a.value);
    return b;
  }

 private:
  std::vector<Atom> atoms_;
};

// Uniform core on [-t0, t0] joined to prescribed tails log P(Y > t), log P(Y < -t) for t >= t0.
class CoreTailLaw final : public Law {
 public:
  using LogTail = std::function<double(double)>;

  CoreTailLaw(double t0, LogTail right, LogTail left, std::vector<double> extra_breaks)
      : t0_(t0), right_(std::move(right)), left_(std::move(left)),
        breaks_(std::move(extra_breaks)) {
    r0_ = std::exp(right_(t0_));
    l0_ = std::exp(left_(t0_));
    core_ = 1.0 - r0_ - l0_;
    if (!(core_ >= 0.0))
      throw std::invalid_argument("tail masses at t0 exceed 1; increase t0");
  }

  double log_sf(double y) const override {
    if (y >= t0_) return right_(y);
    if (y >= -t0_) return std::log(r0_ + core_ * (t0_ - y) / (2.0 * t0_));
    return log1mexp(left_(-y));
  }
  double log_below(double y) const override {
    if (y <= -t0_) return left_(-y);
    if (y <= t0_) return std::log(l0_ + core_ * (y + t0_) / (2.0 * t0_));
    return log1mexp(right_(y));
  }
  double quantile(double u) const override {
    if (u < l0_) return -solve(left_, std::log(u));
    if (u <= l0_ + core_) return -t0_ + (u - l0_) / core_ * 2.0 * t0_;
    return solve(right_, std::log1p(-u));
  }
  double isf(double s) const override {
    if (s < r0_) return solve(right_, std::log(s));
    if (s <= r0_ + core_) return t0_ - (s - r0_) / core_ * 2.0 * t0_;
    return -solve(left_, std::log1p(-s));
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b = {-t0_, t0_};
    b.insert(b.end(), breaks_.begin(), breaks_.end());
    return b;
  }

 private:
  // t >= t0 with tail(t) = target, by bisection in log t to 1e-10.
  double solve(const LogTail& tail, double target) const {
    if (target == -kInf) return kInf;
    double lo = std::log(t0_), hi = lo + 1.0;
    while (tail(std::exp(hi)) > target) {
      lo = hi;
      hi = lo + 2.0 * (hi - std::log(t0_));
      if (hi > 709.0) {
        hi = 709.0;
        if (tail(std::exp(hi)) > target) return std::exp(hi);
        break;
      }
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (tail(std::exp(mid)) > target ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }

  double t0_;
  LogTail right_, left_;
  std::vector<double> breaks_;
  double r0_ = 0.0, l0_ = 0.0, core_ = 0.0;
};

bool second_moment_finite(double lambda, const ScaleFunction& g) {
  if (!(lambda > 0.0)) return false;
  // With u = log t the second moment is driven by the integral of exp(-lambda g(u)) du.
  if (g.rho() == 0.0) return lambda > 1.0;
  return true;
}

CoreTailLaw::LogTail designed_tail(double lambda, const ScaleFunction& g) {
  if (is_pos_inf(lambda)) return [](double t) { return detail::log_norm_sf(t); };
  return [lambda, g](double t) {
    const double u = std::log(t);
    return -2.0 * u - lambda * g(u);
  };
}

}  // namespace

TailModel::TailModel(std::shared_ptr<const Law> law, std::string label,
                     std::optional<Moments> known, std::optional<Design> design,
                     std::optional<ScaleFunction> design_g)
    : law_(std::move(law)), label_(std::move(label)), design_(std::move(design)),
      design_g_(std::move(design_g)) {
  moments_ = known ? *known : moments_of_law(*law_, 0.0);
}

double TailModel::log_right(double t) const { return law_->log_sf(t - shift_); }
double TailModel::log_left(double t) const { return law_->log_below(-t - shift_); }
double TailModel::log_abs(double t) const { return logaddexp(log_right(t), log_left(t)); }
double TailModel::survival(double t) const { return std::exp(log_right(t)); }
double TailModel::left_tail(double t) const { return std::exp(log_left(t)); }

TailModel TailModel::centered() const {
  if (!std::isfinite(moments_.mu)) throw std::domain_error("cannot center: mean is not finite");
  TailModel m = *this;
  m.shift_ -= moments_.mu;
  m.moments_.mu = 0.0;
  m.moments_.second = m.moments_.sigma2;
  if (label_.find("centered") == std::string::npos) m.label_ += " centered";
  return m;
}

std::vector<double> sample(const TailModel& model, std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  const auto& k = kernels::active();
  k.uniforms({seed, stream_id(Purpose::sample, 0)}, 0, out);
  model.law().quantile_batch(out, k);
  for (double& v : out) v += model.shift();
  return out;
}

TailModel make_gaussian(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
  return TailModel(std::make_shared<GaussianLaw>(mu, sigma),
                   "gaussian(mu=" + num(mu) + ",sigma=" + num(sigma) + ")",
                   Moments{mu, sigma * sigma, sigma * sigma + mu * mu});
}

TailModel make_discrete(std::vector<Atom> atoms, std::string label) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.prob >= 0.0) || !std::isfinite(a.value))
      throw std::invalid_argument("discrete atoms need finite values and nonnegative mass");
    total += a.prob;
    if (a.prob == 0.0) continue;
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().prob += a.prob;
    else
      merged.push_back(a);
  }
  if (merged.empty() || std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("discrete masses must sum to 1");
  double m1 = 0.0, m2 = 0.0;
  for (const Atom& a : merged) {
    m1 += a.prob * a.value;
    m2 += a.prob * a.value * a.value;
  }
  double var = 0.0;
  for (const Atom& a : merged) var += a.prob * (a.value - m1) * (a.value - m1);
  return TailModel(std::make_shared<DiscreteLaw>(merged), std::move(label), Moments{m1, var, m2});
}

TailModel make_two_point(double p_high, double low, double high) {
  if (!(p_high >= 0.0 && p_high <= 1.0) || !(low < high))
    throw std::invalid_argument("two_point needs p in [0,1] and low < high");
  return make_discrete({{low, 1.0 - p_high}, {high, p_high}},
                       "two_point(p=" + num(p_high) + ",low=" + num(low) + ",high=" + num(high) + ")");
}

TailModel make_constant(double value) {
  return make_discrete({{value, 1.0}}, "constant(" + num(value) + ")");
}

TailModel make_pareto(double alpha, double xm) {
  if (!(alpha > 0.0) || !(xm > 0.0)) throw std::invalid_argument("pareto needs alpha, xm > 0");
  const double mean = alpha > 1.0 ? alpha * xm / (alpha - 1.0) : kInf;
  const double second = alpha > 2.0 ? alpha * xm * xm / (alpha - 2.0) : kInf;
  const double var = alpha > 2.0 ? second - mean * mean : kInf;
  return TailModel(std::make_shared<ParetoLaw>(alpha, xm),
                   "pareto(alpha=" + num(alpha) + ",xm=" + num(xm) + ")",
                   Moments{mean, var, second});
}

TailModel make_designed_tail(double lambda_plus, double lambda_minus, const ScaleFunction& g,
                             double t0) {
  if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
  if (!(lambda_plus >= 0.0) || !(lambda_minus >= 0.0))
    throw std::invalid_argument("design exponents must be nonnegative");
  if (!second_moment_finite(lambda_plus, g) || !second_moment_finite(lambda_minus, g))
    throw std::invalid_argument("design exponents give an infinite second moment");
  auto law = std::make_shared<CoreTailLaw>(t0, designed_tail(lambda_plus, g),
                                           designed_tail(lambda_minus, g), std::vector<double>{});
  Design d{DesignKind::designed, lambda_plus, lambda_minus, t0, 0.0, {}, {}};
  TailModel m(law, "designed(lambda_plus=" + num(lambda_plus) + ",lambda_minus=" +
                       num(lambda_minus) + ",g=" + g.label() + ",t0=" + num(t0) + ")",
              std::nullopt, d, g);
  if (!std::isfinite(m.sigma2()))
    throw std::invalid_argument("design exponents give an infinite second moment");
  return m.centered();
}

TailModel make_oscillating_tail(double lambda_lo, double lambda_hi, const ScaleFunction& g,
                                double block_growth) {
  if (!(lambda_lo > 0.0) || !(lambda_lo < lambda_hi) || !std::isfinite(lambda_hi))
    throw std::invalid_argument("oscillating tail needs 0 < lambda_lo < lambda_hi < inf");
  if (!(block_growth > 1.0)) throw std::invalid_argument("block_growth must exceed 1");
  if (!second_moment_finite(lambda_lo, g))
    throw std::invalid_argument("lambda_lo gives an infinite second moment");

  // Peaks p_k carry h = hi*g(p_k). h stays flat until the trough tau_k where
  // lo*g(tau_k) = h, then rises linearly in g up to p_{k+1} = growth * tau_k.
  Design d{DesignKind::oscillating, lambda_lo, lambda_hi, 0.0, block_growth, {}, {}};
  double p = std::max(1.0, g.inverse(1.0));
  d.t0 = std::exp(p);
  while (p < 1e5) {
    d.peaks.push_back(p);
    const double tau = g.inverse(lambda_hi * g(p) / lambda_lo);
    d.troughs.push_back(tau);
    p = block_growth * tau;
  }

  auto h = [d, g](double u) {
    const auto& P = d.peaks;
    const auto& T = d.troughs;
    const double hi = d.lam_minus, lo = d.lam_plus;
    if (u <= P.front()) return hi * g(P.front());
    // Block k spans [P[k], P[k+1]); the last trough closes the schedule.
    const auto k = static_cast<std::size_t>(std::upper_bound(P.begin(), P.end(), u) - P.begin() - 1);
    if (u <= T[k]) return hi * g(P[k]);
    if (k + 1 == P.size()) return lo * g(u);
    const double g0 = g(T[k]), g1 = g(P[k + 1]);
    const double h0 = lo * g0, h1 = hi * g1;
    return h0 + (h1 - h0) * (g(u) - g0) / (g1 - g0);
  };
  auto tail = [h](double t) {
    const double u = std::log(t);
    return -2.0 * u - h(u);
  };
  std::vector<double> breaks;
  for (std::size_t k = 0; k < d.peaks.size(); ++k) {
    for (double u : {d.peaks[k], d.troughs[k]}) {
      if (u < 700.0) {
        breaks.push_back(std::exp(u));
        breaks.push_back(-std::exp(u));
      }
    }
  }
  auto law = std::make_shared<CoreTailLaw>(d.t0, tail, tail, breaks);
  TailModel m(law, "oscillating(lo=" + num(lambda_lo) + ",hi=" + num(lambda_hi) + ",g=" +
                       g.label() + ",growth=" + num(block_growth) + ")",
              std::nullopt, d, g);
  return m.centered();
}

}  // namespace mdrate
