// Compiled with -mavx2 only. Callers must check backend_available(Backend::avx2)
// before touching this table.
#include <immintrin.h>

#include "attrition/simd/kernels.hpp"

namespace attrition::simd::detail {
namespace {

inline double fold_lanes(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = fold_lanes(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double total = fold_lanes(acc);
  for (; i < n; ++i) total += a[i];
  return total;
}

double sum_sq_dev_avx2(const double* a, double shift, std::size_t n) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), s);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = fold_lanes(acc);
  for (; i < n; ++i) {
    const double d = a[i] - shift;
    total += d * d;
  }
  return total;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(a, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

constexpr KernelTable kAvx2{Backend::avx2, dot_avx2, sum_avx2, sum_sq_dev_avx2, axpy_avx2, mul_avx2};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace attrition::simd::detail
