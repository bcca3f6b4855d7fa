#include "tricluster/kernels.hpp"

#include <cassert>
#include <cmath>

namespace tricluster::kernels::scalar {

namespace {

// Neumaier compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + carry; }
};

}  // namespace

double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table) {
  Accumulator acc;
  for (const std::uint32_t c : counts) {
    assert(c < table.size());
    acc.add(table[c]);
  }
  return acc.value();
}

double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table) {
  assert(a.size() == b.size());
  Accumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    assert(std::size_t{a[i]} + b[i] < table.size());
    acc.add(table[a[i] + b[i]] - table[a[i]] - table[b[i]]);
  }
  return acc.value();
}

}  // namespace tricluster::kernels::scalar
