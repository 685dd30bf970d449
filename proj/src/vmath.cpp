#include "vmath.hpp"

#include <cmath>

#if defined(SCATTER_HAVE_LIBMVEC) && defined(__AVX2__)
#include <immintrin.h>
extern "C" __m256d _ZGVdN4v_sin(__m256d);
extern "C" __m256d _ZGVdN4v_cos(__m256d);
#define SCATTER_VECTOR_MATH 1
#endif

namespace scatter::detail {

#ifdef SCATTER_VECTOR_MATH

namespace {

template <__m256d (*F)(__m256d)>
void apply(const double *x, double *out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, F(_mm256_loadu_pd(x + i)));
  if (i == n)
    return;
  // Pad the tail so it goes through the same kernel.
  alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; i + k < n; ++k)
    buf[k] = x[i + k];
  _mm256_store_pd(buf, F(_mm256_load_pd(buf)));
  for (std::size_t k = 0; i + k < n; ++k)
    out[i + k] = buf[k];
}

} // namespace

void vsin(const double *x, double *out, std::size_t n) { apply<_ZGVdN4v_sin>(x, out, n); }
void vcos(const double *x, double *out, std::size_t n) { apply<_ZGVdN4v_cos>(x, out, n); }

#else

void vsin(const double *x, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::sin(x[i]);
}

void vcos(const double *x, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::cos(x[i]);
}

#endif

} // namespace scatter::detail
