#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace quadembed::simd {

// Row-compressed layout of a sparse third-order tensor B_ijk: the entries of
// output row i live in [row_ptr[i], row_ptr[i+1]) of the parallel arrays.
// Index arrays are int32 so they feed AVX2 gathers directly.
struct CompressedTensor {
  int dim = 0;
  std::vector<std::int32_t> row_ptr;
  std::vector<std::int32_t> j;
  std::vector<std::int32_t> k;
  std::vector<double> value;
};

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Best instruction set supported by the running CPU, unless overridden by
// force_isa() or the QUADEMBED_ISA environment variable ("scalar"/"avx2").
Isa active_isa();
bool isa_available(Isa isa);
void force_isa(Isa isa);
void reset_isa();

// out_i = sum_{jk} B_ijk y_j y_k
void quadratic_apply(const CompressedTensor& t, std::span<const double> y, std::span<double> out);
// out_i = sum_{jk} B_ijk (v_j y_k + y_j v_k), the derivative of the quadratic map at y along v
void quadratic_jvp(const CompressedTensor& t, std::span<const double> y, std::span<const double> v,
                   std::span<double> out);
// sum_{ijk} B_ijk y_i y_j y_k
double cubic_form(const CompressedTensor& t, std::span<const double> y);

namespace scalar {
void quadratic_apply(const CompressedTensor& t, const double* y, double* out);
void quadratic_jvp(const CompressedTensor& t, const double* y, const double* v, double* out);
double cubic_form(const CompressedTensor& t, const double* y);
}  // namespace scalar

namespace avx2 {
void quadratic_apply(const CompressedTensor& t, const double* y, double* out);
void quadratic_jvp(const CompressedTensor& t, const double* y, const double* v, double* out);
double cubic_form(const CompressedTensor& t, const double* y);
}  // namespace avx2

}  // namespace quadembed::simd
