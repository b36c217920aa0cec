// Scale functions g, nondecreasing and regularly varying with index rho,
// and the thresholds built from them.
#pragma once

#include <span>
#include <string>
#include <vector>

namespace mdrate {

enum class ScaleKind {
  power,          // t^rho
  log,            // log(t v 1), rho = 0
  tlog,           // t * log(t v e), rho = 1
  power_logcorr,  // t^rho * (1 + 1/log(t v e))
};

class ScaleFunction {
 public:
  static ScaleFunction identity() { return power(1.0); }
  static ScaleFunction power(double rho);
  static ScaleFunction log_clamped();
  static ScaleFunction t_log();
  static ScaleFunction power_log_correction(double rho);

  double operator()(double t) const;
  double rho() const { return rho_; }
  ScaleKind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  // Smallest u >= 0 with g(u) >= y, by bisection on the monotone g.
  double inverse(double y) const;

  friend bool operator==(const ScaleFunction& a, const ScaleFunction& b) {
    return a.kind_ == b.kind_ && a.rho_ == b.rho_;
  }

 private:
  ScaleFunction(ScaleKind kind, double rho, std::string label)
      : kind_(kind), rho_(rho), label_(std::move(label)) {}

  ScaleKind kind_;
  double rho_;
  std::string label_;
};

inline double eval(const ScaleFunction& g, double t) { return g(t); }

struct RegularVariationEntry {
  double x;
  double ratio;      // g(x t_max) / g(t_max)
  double target;     // x^rho
  double deviation;  // |ratio - target|
  bool pass;
};

struct RegularVariationReport {
  double t_max;
  double tol;
  std::vector<RegularVariationEntry> entries;
  double max_deviation;
  bool pass;
};

RegularVariationReport check_regular_variation(const ScaleFunction& g,
                                               std::span<const double> x_grid, double t_max,
                                               double tol);

// s * sqrt(n g(log n)). n is real so the continuous-argument form is available.
double scaled_threshold(const ScaleFunction& g, double s, double n);

// delta_hat * sqrt(n / g(log n)).
double truncation_level(const ScaleFunction& g, double n, double delta_hat);

// phi_s(t) = s * sqrt(t g(log(t v e))).
double phi(const ScaleFunction& g, double s, double t);

struct HalfIndexResult {
  double ratio;      // g(log phi_s(t_max)) / g(log t_max)
  double predicted;  // 2^{-rho}
};

HalfIndexResult half_index_limit(const ScaleFunction& g, double s, double t_max);

}  // namespace mdrate
