#include "tricluster/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tricluster {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kInitialTable = 1u << 12;
// Below this the asymptotic series for lgamma differences is not used.
constexpr double kSeriesThreshold = 1.0e4;

double log_add_exp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  if (x < y) std::swap(x, y);
  return x + std::log1p(std::exp(y - x));
}

double lgamma_tail(double z) {
  const double z2 = z * z;
  return 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) +
         1.0 / (1260.0 * z * z2 * z2);
}

// lgamma(x) - lgamma(y) for y >= kSeriesThreshold, x > y.
double lgamma_difference(double x, double y) {
  const double h = x - y;
  // (x - 1/2) log x - (y - 1/2) log y, without cancelling two huge terms.
  return h * std::log(x) + (y - 0.5) * std::log1p(h / y) - h +
         lgamma_tail(x) - lgamma_tail(y);
}

}  // namespace

CombinatoricsTable::CombinatoricsTable() : current_(nullptr) {
  auto block = std::make_unique<Block>();
  block->values.resize(kInitialTable);
  block->values[0] = 0.0;
  block->values[1] = 0.0;
  for (std::uint64_t k = 2; k < kInitialTable; ++k) {
    block->values[k] = std::lgamma(static_cast<double>(k) + 1.0);
  }
  current_.store(block.get(), std::memory_order_release);
  blocks_.push_back(std::move(block));
}

CombinatoricsTable& CombinatoricsTable::shared() {
  static CombinatoricsTable table;
  return table;
}

double CombinatoricsTable::log_factorial(std::uint64_t n) const {
  const Block* block = current_.load(std::memory_order_acquire);
  if (n < block->values.size()) return block->values[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

std::span<const double> CombinatoricsTable::factorials() const {
  return current_.load(std::memory_order_acquire)->values;
}

std::span<const double> CombinatoricsTable::reserve(std::uint64_t n) {
  const Block* block = current_.load(std::memory_order_acquire);
  if (n < block->values.size()) return block->values;

  std::lock_guard lock(grow_mutex_);
  block = current_.load(std::memory_order_acquire);
  if (n < block->values.size()) return block->values;

  const std::uint64_t old_size = block->values.size();
  const std::uint64_t new_size = std::max<std::uint64_t>(2 * old_size, n + 1);
  auto grown = std::make_unique<Block>();
  grown->values.reserve(new_size);
  grown->values.assign(block->values.begin(), block->values.end());
  grown->values.resize(new_size);
  for (std::uint64_t k = old_size; k < new_size; ++k) {
    grown->values[k] = std::lgamma(static_cast<double>(k) + 1.0);
  }
  const Block* published = grown.get();
  blocks_.push_back(std::move(grown));
  current_.store(published, std::memory_order_release);
  return published->values;
}

std::shared_ptr<const std::vector<double>>
CombinatoricsTable::cumulative_stirling_row(std::uint64_t n) {
  {
    std::lock_guard lock(stirling_mutex_);
    if (auto it = stirling_.find(n); it != stirling_.end()) return it->second;
  }

  std::vector<double> row;
  if (stirling_is_exact(n)) {
    row = detail::log_stirling_row_exact(n);
  } else {
    row.assign(n + 1, kNegInf);
    for (std::uint64_t k = 1; k <= n; ++k) {
      row[k] = detail::log_stirling_saddle(n, k);
    }
  }
  // Prefix log-sum-exp turns S(n, k) into B(n, k).
  double acc = kNegInf;
  for (std::uint64_t k = 1; k <= n; ++k) {
    acc = log_add_exp(acc, row[k]);
    row[k] = acc;
  }
  row[0] = kNegInf;

  auto shared_row = std::make_shared<const std::vector<double>>(std::move(row));
  std::lock_guard lock(stirling_mutex_);
  auto [it, inserted] = stirling_.emplace(n, shared_row);
  return it->second;
}

double CombinatoricsTable::log_cumulative_stirling(std::uint64_t n,
                                                   std::uint64_t k) {
  if (k < 1 || k > n) {
    throw std::domain_error("log_cumulative_stirling: need 1 <= k <= n, got n=" +
                            std::to_string(n) + " k=" + std::to_string(k));
  }
  if (k == 1) return 0.0;
  return (*cumulative_stirling_row(n))[k];
}

double log_factorial(std::uint64_t n) {
  return CombinatoricsTable::shared().log_factorial(n);
}

double log_factorial_ratio(std::uint64_t a, std::uint64_t b) {
  if (a == b) return 0.0;
  if (a < b) return -log_factorial_ratio(b, a);
  const std::uint64_t gap = a - b;
  if (gap <= 16 && a < (std::uint64_t{1} << 53)) {
    double product = 1.0;
    for (std::uint64_t k = b + 1; k <= a; ++k) {
      product *= static_cast<double>(k);
    }
    return std::log(product);
  }
  const double y = static_cast<double>(b) + 1.0;
  if (y >= kSeriesThreshold) {
    return lgamma_difference(static_cast<double>(a) + 1.0, y);
  }
  const auto& table = CombinatoricsTable::shared();
  return table.log_factorial(a) - table.log_factorial(b);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::domain_error("log_binomial: need 0 <= k <= n, got n=" +
                            std::to_string(n) + " k=" + std::to_string(k));
  }
  const auto un = static_cast<std::uint64_t>(n);
  const auto small = static_cast<std::uint64_t>(std::min(k, n - k));
  if (small == 0) return 0.0;
  return log_factorial_ratio(un, un - small) - log_factorial(small);
}

double log_cumulative_stirling(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 1 || k > n) {
    throw std::domain_error(
        "log_cumulative_stirling: need 1 <= k <= n, got n=" +
        std::to_string(n) + " k=" + std::to_string(k));
  }
  return CombinatoricsTable::shared().log_cumulative_stirling(
      static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
}

namespace detail {

std::vector<double> log_stirling_row_exact(std::uint64_t n) {
  std::vector<double> log_k(n + 1, 0.0);
  for (std::uint64_t k = 1; k <= n; ++k) {
    log_k[k] = std::log(static_cast<double>(k));
  }
  // row[k] holds log S(m, k) for the current m; S(0, 0) = 1.
  std::vector<double> row(n + 1, kNegInf);
  row[0] = 0.0;
  for (std::uint64_t m = 1; m <= n; ++m) {
    for (std::uint64_t k = m; k >= 1; --k) {
      const double stay = row[k] == kNegInf ? kNegInf : log_k[k] + row[k];
      row[k] = log_add_exp(stay, row[k - 1]);
    }
    row[0] = kNegInf;
  }
  return row;
}

double log_stirling_saddle(std::uint64_t n, std::uint64_t k) {
  if (k == 0 || k > n) return kNegInf;
  if (k == 1 || k == n) return 0.0;
  if (k == n - 1) return log_binomial(static_cast<std::int64_t>(n), 2);

  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double rho = dn / dk;

  // Solve r / (1 - exp(-r)) = rho, an increasing convex function of r.
  double r = rho < 2.0 ? 2.0 * (rho - 1.0) : rho;
  for (int iter = 0; iter < 200; ++iter) {
    const double q = -std::expm1(-r);
    const double phi = r / q;
    const double dphi = (q - r * std::exp(-r)) / (q * q);
    const double step = (phi - rho) / dphi;
    r -= step;
    if (r <= 0.0) r = 1e-300;
    if (std::fabs(step) <= 1e-15 * r) break;
  }

  const double em = std::exp(-r);
  const double q = -std::expm1(-r);  // 1 - e^-r
  double numer;                      // 1 - (1 + r) e^-r
  if (r < 1e-2) {
    numer = r * r * (0.5 - r * (1.0 / 3.0 - r * (1.0 / 8.0 - r / 30.0)));
  } else {
    numer = q - r * em;
  }
  const double variance = dk * r * numer / (q * q);
  const double log_expm1_r = r + std::log(q);

  return log_factorial(n) - log_factorial(k) + dk * log_expm1_r -
         dn * std::log(r) - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

}  // namespace detail

}  // namespace tricluster
