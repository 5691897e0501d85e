// AArch64 Advanced SIMD. Two float64x2 accumulators hold lanes {0,1} and {2,3}
// so the fold order matches the scalar reference.
#include <arm_neon.h>

#include "attrition/simd/kernels.hpp"

namespace attrition::simd::detail {
namespace {

inline double fold_lanes(float64x2_t lo, float64x2_t hi) {
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = fold_lanes(lo, hi);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(a + i));
    hi = vaddq_f64(hi, vld1q_f64(a + i + 2));
  }
  double total = fold_lanes(lo, hi);
  for (; i < n; ++i) total += a[i];
  return total;
}

double sum_sq_dev_neon(const double* a, double shift, std::size_t n) {
  const float64x2_t s = vdupq_n_f64(shift);
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), s);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), s);
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double total = fold_lanes(lo, hi);
  for (; i < n; ++i) {
    const double d = a[i] - shift;
    total += d * d;
  }
  return total;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

constexpr KernelTable kNeon{Backend::neon, dot_neon, sum_neon, sum_sq_dev_neon, axpy_neon, mul_neon};

}  // namespace

const KernelTable& neon_table() noexcept { return kNeon; }

}  // namespace attrition::simd::detail
