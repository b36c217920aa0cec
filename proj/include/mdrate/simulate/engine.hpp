// Deterministic chunked replication. Replications are cut into fixed-size
// chunks; chunk k draws from Philox stream (seed, purpose, k) only, and
// callers reduce the per-chunk results in chunk order. The output is
// therefore independent of the worker count.
#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace mdrate {

inline constexpr std::size_t kChunkReps = 4096;

// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned workers);

// Calls body(k) once for every k in [0, chunks) across up to `workers` threads.
void for_each_chunk(std::size_t chunks, unsigned workers, const std::function<void(std::size_t)>& body);

template <typename Partial, typename F>
std::vector<Partial> run_chunks(std::uint64_t reps, unsigned workers, F&& per_chunk) {
  const std::size_t chunks = static_cast<std::size_t>((reps + kChunkReps - 1) / kChunkReps);
  std::vector<Partial> out(chunks);
  for_each_chunk(chunks, workers, [&](std::size_t k) {
    const std::uint64_t first = static_cast<std::uint64_t>(k) * kChunkReps;
    const std::uint64_t count = std::min<std::uint64_t>(kChunkReps, reps - first);
    out[k] = per_chunk(k, count);
  });
  return out;
}

// Running sums of w and w^2 in log space for importance-sampling weights.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double s1 = 0.0;  // sum of exp(lw - max)
  double s2 = 0.0;  // sum of exp(2 (lw - max))
  std::uint64_t count = 0;

  void add(double lw);
  void merge(const LogSum& o);
  double log_sum() const;     // log sum w
  double log_sum_sq() const;  // log sum w^2
};

}  // namespace mdrate
