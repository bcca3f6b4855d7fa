#include <cstdlib>
#include <string_view>

#include "tricluster/kernels.hpp"

namespace tricluster::kernels {

namespace {

Isa detect() noexcept {
  if (const char* forced = std::getenv("TRICLUSTER_SIMD")) {
    if (std::string_view{forced} == "scalar") return Isa::scalar;
  }
  return avx2::available() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table) {
  // Gathers only pay off past a handful of lanes.
  if (counts.size() >= 8 && active_isa() == Isa::avx2) {
    return avx2::sum_log_factorial(counts, table);
  }
  return scalar::sum_log_factorial(counts, table);
}

double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table) {
  if (a.size() >= 8 && active_isa() == Isa::avx2) {
    return avx2::sum_merge_gain(a, b, table);
  }
  return scalar::sum_merge_gain(a, b, table);
}

}  // namespace tricluster::kernels
