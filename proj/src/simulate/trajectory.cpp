#include "tilted_core.hpp"

#include "mdrate/rng.hpp"
#include "mdrate/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdrate {

std::pair<double, double> rate_band(const TailModel& model, const ScaleFunction& g, double x,
                                    Side side, const GridSpec& grid) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(model.sigma2()) || !(model.sigma2() > 0.0)) return {nan, nan};
  const RateSpec spec{model.sigma2(), g.rho(), exponents_from_tail(model, g, grid)};
  return {rate_limsup(spec, x, side), rate_liminf(spec, x, side)};
}

Trajectory convergence_trajectory(const TailModel& model, const ScaleFunction& g, double x,
                                  const std::vector<std::int64_t>& n_grid, Method method,
                                  const RunOptions& opt, std::optional<double> eps, Side side,
                                  const GridSpec& band_grid) {
  if (n_grid.empty()) throw std::invalid_argument("convergence_trajectory: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("convergence_trajectory: n grid must be strictly increasing");
  if (method != Method::crude && side != Side::upper)
    throw std::invalid_argument("convergence_trajectory: only crude supports lower or two-sided");

  Trajectory out;
  std::tie(out.rate_limsup, out.rate_liminf) = rate_band(model, g, x, side, band_grid);
  auto row = [&](Estimate e, std::string err = {}) {
    return TrajectoryRow{e, out.rate_limsup, out.rate_liminf, std::move(err)};
  };
  for (const std::int64_t n : n_grid) {
    RunOptions o = opt;
    o.seed = mix_seed(opt.seed ^ static_cast<std::uint64_t>(n));
    Estimate failed;
    failed.n = n;
    failed.x = x;
    failed.method = method;
    failed.reps = opt.reps;
    failed.flags = flag::estimator_error;
    failed.p_hat = failed.log_p = failed.normalized = std::numeric_limits<double>::quiet_NaN();
    try {
      switch (method) {
        case Method::crude:
          out.rows.push_back(row(crude_mc(model, g, n, x, o, side)));
          break;
        case Method::tilted:
          out.rows.push_back(row(tilted_mc_truncated(model, g, n, x, 0.0, o)));
          break;
        case Method::conditional_lower:
        case Method::split: {
          const auto s = split_estimate(model, g, n, x, eps, o);
          if (method == Method::split) out.rows.push_back(row(s.upper));
          out.rows.push_back(row(s.lower));
          break;
        }
      }
    } catch (const std::exception& ex) {
      if (dynamic_cast<const detail::TiltFailure*>(&ex)) failed.flags |= flag::tilt_failed;
      out.rows.push_back(row(failed, ex.what()));
      if (method == Method::split) {
        failed.method = Method::conditional_lower;
        out.rows.push_back(row(failed, ex.what()));
      }
    }
  }
  return out;
}

}  // namespace mdrate
