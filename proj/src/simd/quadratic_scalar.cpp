#include "quadembed/simd/quadratic_kernels.hpp"

namespace quadembed::simd::scalar {

void quadratic_apply(const CompressedTensor& t, const double* y, double* out) {
  for (int i = 0; i < t.dim; ++i) {
    double acc = 0.0;
    for (std::int32_t e = t.row_ptr[i]; e < t.row_ptr[i + 1]; ++e) acc += t.value[e] * y[t.j[e]] * y[t.k[e]];
    out[i] = acc;
  }
}

void quadratic_jvp(const CompressedTensor& t, const double* y, const double* v, double* out) {
  for (int i = 0; i < t.dim; ++i) {
    double acc = 0.0;
    for (std::int32_t e = t.row_ptr[i]; e < t.row_ptr[i + 1]; ++e) {
      const std::int32_t j = t.j[e], k = t.k[e];
      acc += t.value[e] * (v[j] * y[k] + y[j] * v[k]);
    }
    out[i] = acc;
  }
}

double cubic_form(const CompressedTensor& t, const double* y) {
  double sum = 0.0;
  for (int i = 0; i < t.dim; ++i) {
    double acc = 0.0;
    for (std::int32_t e = t.row_ptr[i]; e < t.row_ptr[i + 1]; ++e) acc += t.value[e] * y[t.j[e]] * y[t.k[e]];
    sum += y[i] * acc;
  }
  return sum;
}

}  // namespace quadembed::simd::scalar
