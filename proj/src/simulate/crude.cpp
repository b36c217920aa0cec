#include "mdrate/kernels/kernels.hpp"
#include "mdrate/rng.hpp"
#include "mdrate/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mdrate {

Estimate crude_mc(const TailModel& model, const ScaleFunction& g, std::int64_t n, double x,
                  const RunOptions& opt, Side side) {
  if (n < 2) throw std::invalid_argument("crude_mc: n must be >= 2");
  if (!(x > 0.0)) throw std::invalid_argument("crude_mc: x must be positive");
  if (opt.reps < 1000) throw std::invalid_argument("crude_mc: reps must be >= 1000");
  if (!std::isfinite(model.mu())) throw std::invalid_argument("crude_mc: model mean is not finite");

  const double threshold = scaled_threshold(g, x, static_cast<double>(n));
  // Work with Y = X - shift so the sum needs no per-draw shift.
  const double centre = static_cast<double>(n) * (model.mu() - model.shift());
  const std::uint64_t blocks_per_rep = (static_cast<std::uint64_t>(n) + 1) / 2;
  const auto& k = kernels::active();
  const Law& law = model.law();

  auto hits = run_chunks<std::uint64_t>(opt.reps, opt.workers, [&](std::size_t chunk,
                                                                    std::uint64_t count) {
    const kernels::StreamKey key{opt.seed, stream_id(Purpose::crude, chunk)};
    std::vector<double> buf(static_cast<std::size_t>(n));
    std::uint64_t h = 0;
    for (std::uint64_t r = 0; r < count; ++r) {
      k.uniforms(key, r * blocks_per_rep, buf);
      law.quantile_batch(buf, k);
      const double dev = k.sum(buf) - centre;
      bool hit = false;
      switch (side) {
        case Side::upper: hit = dev > threshold; break;
        case Side::lower: hit = dev < -threshold; break;
        case Side::two_sided: hit = std::fabs(dev) > threshold; break;
      }
      h += hit;
    }
    return h;
  });

  Estimate e;
  e.n = n;
  e.x = x;
  e.method = Method::crude;
  e.reps = opt.reps;
  for (auto h : hits) e.hits += h;
  const double reps = static_cast<double>(opt.reps);
  const double p = static_cast<double>(e.hits) / reps;
  finish_estimate(e, g, e.hits == 0 ? -std::numeric_limits<double>::infinity() : std::log(p),
                  e.hits == 0 ? 0.0 : std::sqrt((1.0 - p) / (p * reps)));
  if (e.hits > 0) {
    e.p_hat = p;
    e.stderr_p = std::sqrt(p * (1.0 - p) / reps);
  }
  return e;
}

}  // namespace mdrate
