#include "mdrate/simulate.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

namespace mdrate {
namespace {

using Weight = unsigned __int128;

void check_law(const IntLaw& law, int n) {
  if (law.values.empty() || law.values.size() != law.weights.size())
    throw std::invalid_argument("levy_maximal_check: values and weights must match and be nonempty");
  if (law.values.size() > 4) throw std::invalid_argument("levy_maximal_check: support size > 4");
  if (n < 1 || n > 6) throw std::invalid_argument("levy_maximal_check: n must lie in [1, 6]");
  const std::uint64_t d = std::accumulate(law.weights.begin(), law.weights.end(), std::uint64_t{0});
  if (d == 0 || d > (1u << 16)) throw std::invalid_argument("levy_maximal_check: weight total in [1, 65536]");
}

// Law of T_k as value -> weight, total weight D^k.
std::map<std::int64_t, Weight> convolve(const IntLaw& law, int k) {
  std::map<std::int64_t, Weight> dist{{0, 1}};
  for (int i = 0; i < k; ++i) {
    std::map<std::int64_t, Weight> next;
    for (const auto& [s, w] : dist)
      for (std::size_t j = 0; j < law.values.size(); ++j)
        if (law.weights[j] > 0) next[s + law.values[j]] += w * law.weights[j];
    dist = std::move(next);
  }
  return dist;
}

double ratio(Weight num, Weight den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<std::int64_t> doubled_medians(const IntLaw& law, int n) {
  check_law(law, std::max(n, 1));
  std::vector<std::int64_t> med(static_cast<std::size_t>(n) + 1, 0);
  for (int k = 1; k <= n; ++k) {
    const auto dist = convolve(law, k);
    Weight total = 0;
    for (const auto& [s, w] : dist) total += w;
    // lo: smallest m with P(T <= m) >= 1/2; hi: largest m with P(T >= m) >= 1/2.
    std::int64_t lo = 0, hi = 0;
    Weight cum = 0;
    for (const auto& [s, w] : dist) {
      cum += w;
      if (2 * cum >= total) {
        lo = s;
        break;
      }
    }
    cum = 0;
    for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
      cum += it->second;
      if (2 * cum >= total) {
        hi = it->first;
        break;
      }
    }
    med[k] = lo + hi;
  }
  return med;
}

LevyResult levy_maximal_check(const IntLaw& law, int n, double t) {
  check_law(law, n);
  const auto med2 = doubled_medians(law, n);
  const double t2 = 2.0 * t;
  const std::size_t support = law.values.size();

  Weight total = 0, lhs_max = 0, rhs_max = 0, lhs_sum = 0, rhs_sum = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> partial(static_cast<std::size_t>(n) + 1, 0);
  for (;;) {
    Weight w = 1;
    for (int k = 1; k <= n; ++k) {
      w *= law.weights[idx[k - 1]];
      partial[k] = partial[k - 1] + law.values[idx[k - 1]];
    }
    total += w;
    bool a = false, b = false, c = false;
    for (int k = 1; k <= n; ++k) {
      const std::int64_t v2 = 2 * static_cast<std::int64_t>(law.values[idx[k - 1]]);
      a |= static_cast<double>(v2 + med2[k - 1]) > t2;
      b |= static_cast<double>(2 * partial[k]) > t2;
      c |= static_cast<double>(2 * partial[k] + med2[n - k]) > t2;
    }
    if (a) lhs_max += w;
    if (b) rhs_max += w;
    if (c) lhs_sum += w;
    if (static_cast<double>(2 * partial[n]) > t2) rhs_sum += w;

    int pos = 0;
    while (pos < n && ++idx[pos] == support) idx[pos++] = 0;
    if (pos == n) break;
  }

  LevyResult r;
  r.lhs_max = ratio(lhs_max, total);
  r.rhs_max = ratio(rhs_max, total);
  r.pass_max = lhs_max <= 2 * rhs_max;
  r.lhs_sum = ratio(lhs_sum, total);
  r.rhs_sum = ratio(rhs_sum, total);
  r.pass_sum = lhs_sum <= 2 * rhs_sum;
  return r;
}

}  // namespace mdrate
