#include "kernels_impl.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mdrate::kernels {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

const Table& table(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  return isa == Isa::avx2 ? kAvx2Table : kScalarTable;
}

Isa active_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("MDRATE_ISA")) {
      const std::string v(env);
      if (v == "scalar") return Isa::scalar;
      if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return chosen;
}

const Table& active() { return table(active_isa()); }

}  // namespace mdrate::kernels
