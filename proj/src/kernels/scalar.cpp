#include "kernels_impl.hpp"
#include "mdrate/kernels/philox.hpp"
#include "scalar_math.hpp"

#include <array>

namespace mdrate::kernels::scalar {

void uniforms(StreamKey key, std::uint64_t first_block, std::span<double> out) {
  const PhiloxKey k = philox_key(key.seed);
  std::size_t i = 0;
  std::uint64_t block = first_block;
  while (i < out.size()) {
    const PhiloxCounter w = philox4x32_10(philox_counter(block++, key.stream), k);
    const std::array<std::uint64_t, 2> bits = {(std::uint64_t{w[0]} << 32) | w[1],
                                               (std::uint64_t{w[2]} << 32) | w[3]};
    for (std::size_t j = 0; j < 2 && i < out.size(); ++j) out[i++] = unit_from_bits(bits[j]);
  }
}

void log(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = ref::log(in[i]);
}

void exp(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = ref::exp(in[i]);
}

void normal_quantile(std::span<const double> u, std::span<double> out, double mu, double sigma) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = mu + sigma * ref::normal_quantile(u[i]);
}

void pareto_quantile(std::span<const double> u, std::span<double> out, double scale,
                     double alpha) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = ref::pareto_quantile(u[i], scale, alpha);
}

void two_point(std::span<const double> u, std::span<double> out, double p_low, double low,
               double high) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] <= p_low ? low : high;
}

double sum(std::span<const double> in) {
  const std::size_t n8 = in.size() - in.size() % 8;
  std::array<double, 8> s{};
  for (std::size_t i = 0; i < n8; i += 8)
    for (std::size_t j = 0; j < 8; ++j) s[j] += in[i + j];
  double total = ((s[0] + s[4]) + (s[1] + s[5])) + ((s[2] + s[6]) + (s[3] + s[7]));
  for (std::size_t i = n8; i < in.size(); ++i) total += in[i];
  return total;
}

}  // namespace mdrate::kernels::scalar

namespace mdrate::kernels {

const Table kScalarTable = {Isa::scalar,
                            scalar::uniforms,
                            scalar::log,
                            scalar::exp,
                            scalar::normal_quantile,
                            scalar::pareto_quantile,
                            scalar::two_point,
                            scalar::sum};

}  // namespace mdrate::kernels
