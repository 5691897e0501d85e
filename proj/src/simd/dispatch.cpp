#include <cassert>
#include <cstdlib>
#include <string>

#include "attrition/error.hpp"
#include "attrition/simd/kernels.hpp"

namespace attrition::simd {

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2:
#if defined(ATTRITION_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(ATTRITION_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Backend b) {
  if (!backend_available(b)) {
    throw UsageError("SIMD backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
#if defined(ATTRITION_HAVE_AVX2)
    case Backend::avx2: return detail::avx2_table();
#endif
#if defined(ATTRITION_HAVE_NEON)
    case Backend::neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

namespace {

const KernelTable& probe() {
  if (const char* forced = std::getenv("ATTRITION_SIMD")) {
    const std::string_view name(forced);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (name == backend_name(b) && backend_available(b)) return kernels_for(b);
    }
  }
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (backend_available(b)) return kernels_for(b);
  }
  return detail::scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = probe();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double sum_sq_dev(std::span<const double> a, double shift) {
  return active().sum_sq_dev(a.data(), shift, a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().mul(a.data(), b.data(), out.data(), a.size());
}

}  // namespace attrition::simd
