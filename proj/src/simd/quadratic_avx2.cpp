// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.
#include <immintrin.h>

#include "quadembed/simd/quadratic_kernels.hpp"

namespace quadembed::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double row_quadratic(const CompressedTensor& t, int i, const double* y) {
  std::int32_t e = t.row_ptr[i];
  const std::int32_t end = t.row_ptr[i + 1];
  __m256d acc = _mm256_setzero_pd();
  for (; e + 4 <= end; e += 4) {
    const __m128i jj = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.j.data() + e));
    const __m128i kk = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.k.data() + e));
    const __m256d yj = _mm256_i32gather_pd(y, jj, 8);
    const __m256d yk = _mm256_i32gather_pd(y, kk, 8);
    const __m256d b = _mm256_loadu_pd(t.value.data() + e);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(b, yj), yk, acc);
  }
  double sum = hsum(acc);
  // Leftovers
  for (; e < end; ++e) sum += t.value[e] * y[t.j[e]] * y[t.k[e]];
  return sum;
}

}  // namespace

void quadratic_apply(const CompressedTensor& t, const double* y, double* out) {
  for (int i = 0; i < t.dim; ++i) out[i] = row_quadratic(t, i, y);
}

void quadratic_jvp(const CompressedTensor& t, const double* y, const double* v, double* out) {
  for (int i = 0; i < t.dim; ++i) {
    std::int32_t e = t.row_ptr[i];
    const std::int32_t end = t.row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; e + 4 <= end; e += 4) {
      const __m128i jj = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.j.data() + e));
      const __m128i kk = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.k.data() + e));
      const __m256d yj = _mm256_i32gather_pd(y, jj, 8);
      const __m256d yk = _mm256_i32gather_pd(y, kk, 8);
      const __m256d vj = _mm256_i32gather_pd(v, jj, 8);
      const __m256d vk = _mm256_i32gather_pd(v, kk, 8);
      const __m256d b = _mm256_loadu_pd(t.value.data() + e);
      const __m256d s = _mm256_fmadd_pd(vj, yk, _mm256_mul_pd(yj, vk));
      acc = _mm256_fmadd_pd(b, s, acc);
    }
    double sum = hsum(acc);
    for (; e < end; ++e) {
      const std::int32_t j = t.j[e], k = t.k[e];
      sum += t.value[e] * (v[j] * y[k] + y[j] * v[k]);
    }
    out[i] = sum;
  }
}

double cubic_form(const CompressedTensor& t, const double* y) {
  double sum = 0.0;
  for (int i = 0; i < t.dim; ++i) sum += y[i] * row_quadratic(t, i, y);
  return sum;
}

}  // namespace quadembed::simd::avx2
