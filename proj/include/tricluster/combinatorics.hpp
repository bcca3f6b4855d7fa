#pragma once

// Log-space combinatorial kernels used by the description-length criterion.
// Everything is in nats.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace tricluster {

// Above this many elements, log B(n, k) switches from the exact
// log-sum-exp recurrence (O(n^2) work) to a saddle-point approximation of
// each Stirling number.
inline constexpr std::uint64_t kExactStirlingLimit = 6000;

// Shared cache of log(n!) and of log B(n, k) = log sum_{j<=k} S(n, j).
//
// The factorial table grows geometrically on demand. Readers never take the
// lock: a grown table is published as a new immutable block and older blocks
// stay alive for the lifetime of the cache, so spans handed out by reserve()
// remain valid.
class CombinatoricsTable {
 public:
  CombinatoricsTable();
  CombinatoricsTable(const CombinatoricsTable&) = delete;
  CombinatoricsTable& operator=(const CombinatoricsTable&) = delete;

  static CombinatoricsTable& shared();

  // Table lookup when cached, lgamma otherwise.
  double log_factorial(std::uint64_t n) const;

  // Guarantees entries [0, n] are tabulated and returns the whole table.
  std::span<const double> reserve(std::uint64_t n);
  std::span<const double> factorials() const;

  // log B(n, k) for 1 <= k <= n.
  double log_cumulative_stirling(std::uint64_t n, std::uint64_t k);
  // The full row log B(n, 0..n); entry 0 is -inf.
  std::shared_ptr<const std::vector<double>> cumulative_stirling_row(
      std::uint64_t n);

 private:
  struct Block {
    std::vector<double> values;
  };

  std::atomic<const Block*> current_;
  std::mutex grow_mutex_;
  std::vector<std::unique_ptr<Block>> blocks_;

  std::mutex stirling_mutex_;
  std::map<std::uint64_t, std::shared_ptr<const std::vector<double>>> stirling_;
};

double log_factorial(std::uint64_t n);

// log(a! / b!), accurate even when both arguments are huge and close.
double log_factorial_ratio(std::uint64_t a, std::uint64_t b);

// log C(n, k). Throws std::domain_error unless 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

// log B(n, k) with B the cumulative Stirling count of set partitions into at
// most k blocks. Throws std::domain_error unless 1 <= k <= n.
double log_cumulative_stirling(std::int64_t n, std::int64_t k);

inline bool stirling_is_exact(std::uint64_t n) {
  return n <= kExactStirlingLimit;
}

namespace detail {
// Exact row log S(n, k), k = 0..n, by the triangular recurrence.
std::vector<double> log_stirling_row_exact(std::uint64_t n);
// Saddle-point estimate of log S(n, k); exact at k in {1, n-1, n}.
double log_stirling_saddle(std::uint64_t n, std::uint64_t k);
}  // namespace detail

}  // namespace tricluster
