#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "quadembed/error.hpp"
#include "quadembed/simd/quadratic_kernels.hpp"

namespace quadembed::simd {

namespace {

bool cpu_has_avx2() {
#if defined(QUADEMBED_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("QUADEMBED_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int> forced{-1};

void check_sizes(const CompressedTensor& t, size_t y, size_t out) {
  if (y < static_cast<size_t>(t.dim) || out < static_cast<size_t>(t.dim))
    throw Error(ErrorCode::InvalidArgument, "vector shorter than tensor dimension");
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() {
  const int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw Error(ErrorCode::InvalidArgument, "instruction set not supported by this CPU");
  forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { forced.store(-1, std::memory_order_relaxed); }

void quadratic_apply(const CompressedTensor& t, std::span<const double> y, std::span<double> out) {
  check_sizes(t, y.size(), out.size());
#ifdef QUADEMBED_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::quadratic_apply(t, y.data(), out.data());
#endif
  scalar::quadratic_apply(t, y.data(), out.data());
}

void quadratic_jvp(const CompressedTensor& t, std::span<const double> y, std::span<const double> v,
                   std::span<double> out) {
  check_sizes(t, std::min(y.size(), v.size()), out.size());
#ifdef QUADEMBED_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::quadratic_jvp(t, y.data(), v.data(), out.data());
#endif
  scalar::quadratic_jvp(t, y.data(), v.data(), out.data());
}

double cubic_form(const CompressedTensor& t, std::span<const double> y) {
  check_sizes(t, y.size(), y.size());
#ifdef QUADEMBED_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::cubic_form(t, y.data());
#endif
  return scalar::cubic_form(t, y.data());
}

}  // namespace quadembed::simd
