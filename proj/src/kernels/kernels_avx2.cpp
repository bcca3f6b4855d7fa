#include "tricluster/kernels.hpp"

#include <cassert>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define TRICLUSTER_HAVE_AVX2_TU 1
#else
#define TRICLUSTER_HAVE_AVX2_TU 0
#endif

namespace tricluster::kernels::avx2 {

#if TRICLUSTER_HAVE_AVX2_TU

namespace {

// Lane-wise Neumaier step: sum += v, carry collects the rounding error.
inline void neumaier(__m256d& sum, __m256d& carry, __m256d v) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d t = _mm256_add_pd(sum, v);
  const __m256d abs_sum = _mm256_andnot_pd(sign_mask, sum);
  const __m256d abs_v = _mm256_andnot_pd(sign_mask, v);
  const __m256d sum_bigger = _mm256_cmp_pd(abs_sum, abs_v, _CMP_GE_OQ);
  const __m256d err_a = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
  const __m256d err_b = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
  carry = _mm256_add_pd(carry, _mm256_blendv_pd(err_b, err_a, sum_bigger));
  sum = t;
}

struct Tail {
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
};

inline double reduce(__m256d sum, __m256d carry, Tail tail) {
  alignas(32) double s[4];
  alignas(32) double c[4];
  _mm256_store_pd(s, sum);
  _mm256_store_pd(c, carry);
  for (int i = 0; i < 4; ++i) tail.add(s[i]);
  return tail.sum + (tail.carry + ((c[0] + c[1]) + (c[2] + c[3])));
}

}  // namespace

bool available() noexcept {
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
}

double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table) {
  const double* base = table.data();
  const std::size_t n = counts.size();
  __m256d sum = _mm256_setzero_pd();
  __m256d carry = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(counts.data() + i));
    neumaier(sum, carry, _mm256_i32gather_pd(base, idx, 8));
  }
  Tail tail;
  for (; i < n; ++i) {
    assert(counts[i] < table.size());
    tail.add(base[counts[i]]);
  }
  return reduce(sum, carry, tail);
}

double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table) {
  assert(a.size() == b.size());
  const double* base = table.data();
  const std::size_t n = a.size();
  __m256d sum = _mm256_setzero_pd();
  __m256d carry = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i ia =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.data() + i));
    const __m128i ib =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(b.data() + i));
    const __m128i iab = _mm_add_epi32(ia, ib);
    const __m256d fa = _mm256_i32gather_pd(base, ia, 8);
    const __m256d fb = _mm256_i32gather_pd(base, ib, 8);
    const __m256d fab = _mm256_i32gather_pd(base, iab, 8);
    neumaier(sum, carry, _mm256_sub_pd(_mm256_sub_pd(fab, fa), fb));
  }
  Tail tail;
  for (; i < n; ++i) {
    assert(std::size_t{a[i]} + b[i] < table.size());
    tail.add(base[a[i] + b[i]] - base[a[i]] - base[b[i]]);
  }
  return reduce(sum, carry, tail);
}

#else

bool available() noexcept { return false; }

double sum_log_factorial(std::span<const std::uint32_t> counts,
                         std::span<const double> table) {
  return scalar::sum_log_factorial(counts, table);
}

double sum_merge_gain(std::span<const std::uint32_t> a,
                      std::span<const std::uint32_t> b,
                      std::span<const double> table) {
  return scalar::sum_merge_gain(a, b, table);
}

#endif

}  // namespace tricluster::kernels::avx2
