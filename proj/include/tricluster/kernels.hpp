#pragma once

// Data-parallel inner loops of the criterion: gathered log-factorial sums over
// count arrays. Every kernel has a scalar reference implementation and an
// AVX2 variant; the public entry points dispatch at runtime on the detected
// instruction set. Setting TRICLUSTER_SIMD=scalar in the environment forces
// the reference path.
//
// All kernels take the log-factorial table as a span and require every index
// they touch (each count, and each pairwise sum for the merge kernel) to be
// strictly below table.size().

#include <cstdint>
#include <span>
#include <string_view>

namespace tricluster::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;

// sum_i table[counts[i]]
double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table);

// sum_i table[a[i] + b[i]] - table[a[i]] - table[b[i]]
// i.e. the log multinomial gain of fusing matched cells of two operands.
double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table);

namespace scalar {
double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table);
double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table);
}  // namespace scalar

namespace avx2 {
// False when the binary was built without x86 support or the CPU lacks AVX2.
bool available() noexcept;
double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table);
double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table);
}  // namespace avx2

}  // namespace tricluster::kernels
