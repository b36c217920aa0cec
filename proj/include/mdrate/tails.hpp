// Analytic distributions with exactly known tails.
//
// A TailModel is X = Y + shift, where Y follows an immutable Law. Laws work
// in log space so tails far below double underflow of P itself stay usable
// for exponent computations.
#pragma once

#include "mdrate/extended.hpp"
#include "mdrate/kernels/kernels.hpp"
#include "mdrate/scale.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdrate {

struct Atom {
  double value;
  double prob;
};

class Law {
 public:
  virtual ~Law() = default;

  virtual double log_sf(double y) const = 0;     // log P(Y > y)
  virtual double log_below(double y) const = 0;  // log P(Y < y)
  virtual double quantile(double u) const = 0;   // inf{y : P(Y <= y) >= u}
  virtual double isf(double s) const = 0;        // inverse of P(Y > y), accurate for small s

  // Replaces uniforms in place by quantiles. Overridden where a kernel exists.
  virtual void quantile_batch(std::span<double> u, const kernels::Table& k) const;

  // Nonempty for purely discrete laws; probabilities sum to 1.
  virtual std::vector<Atom> atoms() const { return {}; }

  // Points where the density or tail formula changes, for quadrature splits.
  virtual std::vector<double> breakpoints() const { return {}; }
};

enum class DesignKind { designed, oscillating };

// Oracle record attached to constructed models.
struct Design {
  DesignKind kind;
  double lam_plus = 0.0;   // designed: right exponent; oscillating: lambda_lo
  double lam_minus = 0.0;  // designed: left exponent; oscillating: lambda_hi
  double t0 = 0.0;
  double growth = 0.0;
  // Oscillating schedule in u = log t: alternating peaks (h/g = hi) and troughs (h/g = lo).
  std::vector<double> peaks;
  std::vector<double> troughs;
};

struct Moments {
  double mu;
  double sigma2;  // +inf when the second moment diverges
  double second;  // E X^2, +inf likewise
};

class TailModel {
 public:
  // Moments are taken from `known` when given (closed forms), otherwise by quadrature.
  TailModel(std::shared_ptr<const Law> law, std::string label, std::optional<Moments> known = {},
            std::optional<Design> design = {}, std::optional<ScaleFunction> design_g = {});

  double survival(double t) const;    // P(X > t)
  double left_tail(double t) const;   // P(X < -t)
  double log_right(double t) const;   // log P(X > t)
  double log_left(double t) const;    // log P(X < -t)
  double log_abs(double t) const;     // log P(|X| > t)

  double mu() const { return moments_.mu; }
  double sigma2() const { return moments_.sigma2; }
  const Moments& moments() const { return moments_; }
  double shift() const { return shift_; }
  const Law& law() const { return *law_; }
  const std::string& label() const { return label_; }
  const std::optional<Design>& design() const { return design_; }
  const std::optional<ScaleFunction>& design_scale() const { return design_g_; }

  // Same law shifted so that E X = 0.
  TailModel centered() const;
  // X = Y + shift for quantile u of Y.
  double quantile(double u) const { return law_->quantile(u) + shift_; }

 private:
  std::shared_ptr<const Law> law_;
  double shift_ = 0.0;
  std::string label_;
  std::optional<Design> design_;
  std::optional<ScaleFunction> design_g_;
  Moments moments_{};
};

// Numeric moments by tail-integral quadrature up to T = 1e12; the second
// moment is flagged infinite if the last decade still adds more than 1%.
Moments moments(const TailModel& model);
Moments moments_of_law(const Law& law, double shift);

// E(X 1{|X| <= c}) and E(X^2 1{|X| <= c}).
struct TruncatedMoments {
  double first;
  double second;
  double p_out;  // P(|X| > c)
};
TruncatedMoments truncated_moments(const TailModel& model, double c);

inline double survival(const TailModel& m, double t) { return m.survival(t); }

// Inverse-transform sampling on Philox stream (seed, sample purpose).
std::vector<double> sample(const TailModel& model, std::uint64_t seed, std::size_t n);

// Presets.
TailModel make_gaussian(double mu = 0.0, double sigma = 1.0);
TailModel make_two_point(double p_high = 0.5, double low = -1.0, double high = 1.0);
TailModel make_discrete(std::vector<Atom> atoms, std::string label);
TailModel make_pareto(double alpha, double xm = 1.0);
TailModel make_constant(double value);
TailModel make_designed_tail(double lambda_plus, double lambda_minus, const ScaleFunction& g,
                             double t0);
TailModel make_oscillating_tail(double lambda_lo, double lambda_hi, const ScaleFunction& g,
                                double block_growth);

}  // namespace mdrate
