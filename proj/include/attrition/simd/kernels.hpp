#pragma once

// Dense double-precision kernels used by the model fitters.
//
// Every backend accumulates reductions in four interleaved lanes
// (lane k sees elements i with i % 4 == k over the 4-aligned prefix), folds the
// lanes as (l0 + l1) + (l2 + l3), and then adds the tail sequentially. The
// scalar reference spells that order out explicitly, so the vector backends are
// required to agree with it bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace attrition::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // Σ (a[i] - shift)^2
  double (*sum_sq_dev)(const double* a, double shift, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

bool backend_available(Backend b) noexcept;

// Kernel table for a specific backend. Throws UsageError if the backend was not
// compiled in or the CPU lacks the instruction set.
const KernelTable& kernels_for(Backend b);

// Best available backend, probed once. ATTRITION_SIMD=scalar|avx2|neon in the
// environment overrides the probe.
const KernelTable& active();

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(ATTRITION_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(ATTRITION_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

// Span conveniences over the active backend. Length mismatches are a caller bug.
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double sum_sq_dev(std::span<const double> a, double shift);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace attrition::simd
