// Stream ids for the counter-based generator. A stream is identified by a
// purpose tag in the top byte and a chunk index below it.
#pragma once

#include <cstdint>

namespace mdrate {

enum class Purpose : std::uint8_t {
  sample = 1,
  crude = 2,
  tilted = 3,
  conditional = 4,
  lemma34 = 5,
  empirical = 6,
};

constexpr std::uint64_t stream_id(Purpose p, std::uint64_t chunk) {
  return (std::uint64_t{static_cast<std::uint8_t>(p)} << 56) | (chunk & ((1ull << 56) - 1));
}

// splitmix64 finalizer, used to derive per-n seeds from a run seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace mdrate
