// Batched numeric kernels used by the Monte Carlo inner loops.
//
// Every entry has a scalar reference implementation and an AVX2 variant.
// The two produce bit-identical output: same polynomials, same operation
// order, no FMA contraction. That makes estimates independent of the ISA
// the dispatcher picks. Input and output spans may alias exactly.
#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace mdrate::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Philox4x32-10 key/stream. Block b of stream s under seed k yields two
// uniforms in (0, 1), each from 53 bits of the 128-bit output.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct Table {
  Isa isa;
  void (*uniforms)(StreamKey key, std::uint64_t first_block, std::span<double> out);
  void (*log)(std::span<const double> in, std::span<double> out);
  void (*exp)(std::span<const double> in, std::span<double> out);
  // mu + sigma * Phi^{-1}(u), AS241 (PPND16).
  void (*normal_quantile)(std::span<const double> u, std::span<double> out, double mu,
                          double sigma);
  // scale * (1 - u)^{-1/alpha}
  void (*pareto_quantile)(std::span<const double> u, std::span<double> out, double scale,
                          double alpha);
  // u <= p_low ? low : high
  void (*two_point)(std::span<const double> u, std::span<double> out, double p_low, double low,
                    double high);
  // Eight interleaved partial sums, folded as ((s0+s4)+(s1+s5))+((s2+s6)+(s3+s7)),
  // then the n % 8 remainder added left to right.
  double (*sum)(std::span<const double> in);
};

bool isa_supported(Isa isa);

// Throws std::invalid_argument if the ISA is not usable on this CPU.
const Table& table(Isa isa);

// Best supported ISA unless MDRATE_ISA=scalar|avx2 overrides it.
Isa active_isa();
const Table& active();

}  // namespace mdrate::kernels
