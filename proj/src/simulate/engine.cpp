#include "mdrate/simulate/engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mdrate {

unsigned resolve_workers(unsigned workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void for_each_chunk(std::size_t chunks, unsigned workers,
                    const std::function<void(std::size_t)>& body) {
  const unsigned w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(chunks, 1));
  if (w <= 1) {
    for (std::size_t k = 0; k < chunks; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned i = 0; i < w; ++i) {
    pool.emplace_back([&] {
      for (std::size_t k = next.fetch_add(1); k < chunks; k = next.fetch_add(1)) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void LogSum::add(double lw) {
  ++count;
  if (lw == -std::numeric_limits<double>::infinity()) return;
  if (lw > max) {
    const double scale = std::exp(max - lw);
    s1 *= scale;
    s2 *= scale * scale;
    max = lw;
  }
  const double d = std::exp(lw - max);
  s1 += d;
  s2 += d * d;
}

void LogSum::merge(const LogSum& o) {
  count += o.count;
  if (o.s1 == 0.0) return;
  if (s1 == 0.0) {
    max = o.max;
    s1 = o.s1;
    s2 = o.s2;
    return;
  }
  if (o.max > max) {
    const double scale = std::exp(max - o.max);
    s1 = s1 * scale + o.s1;
    s2 = s2 * scale * scale + o.s2;
    max = o.max;
  } else {
    const double scale = std::exp(o.max - max);
    s1 += o.s1 * scale;
    s2 += o.s2 * scale * scale;
  }
}

double LogSum::log_sum() const {
  return s1 > 0.0 ? max + std::log(s1) : -std::numeric_limits<double>::infinity();
}

double LogSum::log_sum_sq() const {
  return s2 > 0.0 ? 2.0 * max + std::log(s2) : -std::numeric_limits<double>::infinity();
}

}  // namespace mdrate
