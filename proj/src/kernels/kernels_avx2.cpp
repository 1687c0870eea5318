// Compiled with -mavx2 only. Keep this translation unit free of standard
// library headers so that no AVX2-encoded inline function can leak into
// code that runs on older CPUs.
#include <immintrin.h>

#include <cstddef>

#include "queuenet/kernel_table.hpp"

namespace queuenet::simd {
namespace {

void band_flow(double* out, const double* p, const double* coef, double scale,
               std::ptrdiff_t offset, std::size_t lo, std::size_t hi) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t s = lo;
  for (; s + 4 <= hi; s += 4) {
    __m256d f = _mm256_mul_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(coef + s)), _mm256_loadu_pd(p + s));
    _mm256_storeu_pd(out + s, _mm256_sub_pd(_mm256_loadu_pd(out + s), f));
  }
  for (; s < hi; ++s) out[s] -= (scale * coef[s]) * p[s];

  double* shifted = out + offset;
  s = lo;
  for (; s + 4 <= hi; s += 4) {
    __m256d f = _mm256_mul_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(coef + s)), _mm256_loadu_pd(p + s));
    _mm256_storeu_pd(shifted + s, _mm256_add_pd(_mm256_loadu_pd(shifted + s), f));
  }
  for (; s < hi; ++s) shifted[s] += (scale * coef[s]) * p[s];
}

void axpy(double* out, const double* x, double a, const double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(double* out, const double* p, const double* k1, const double* k2,
                 const double* k3, const double* k4, double h, std::size_t n) {
  const double h6 = h / 6.0;
  const __m256d vh = _mm256_set1_pd(h6);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d outer = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    __m256d inner = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
    __m256d incr = _mm256_mul_pd(vh, _mm256_add_pd(outer, _mm256_mul_pd(two, inner)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(p + i), incr));
  }
  for (; i < n; ++i) out[i] = p[i] + h6 * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
}

inline void spill(__m256d v, double lanes[4]) { _mm256_storeu_pd(lanes, v); }

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double l[4];
  spill(acc, l);
  double total = (l[0] + l[1]) + (l[2] + l[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  double l[4];
  spill(acc, l);
  double total = (l[0] + l[1]) + (l[2] + l[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

inline double pick_min(double a, double b) { return a < b ? a : b; }

double min(const double* x, std::size_t n) {
  // _mm256_min_pd(a, b) yields (a < b) ? a : b per lane, matching pick_min.
  __m256d acc = _mm256_set1_pd(__builtin_inf());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
  double l[4];
  spill(acc, l);
  double m = pick_min(pick_min(l[0], l[1]), pick_min(l[2], l[3]));
  for (; i < n; ++i) m = pick_min(m, x[i]);
  return m;
}

constexpr KernelTable kAvx2{"avx2", band_flow, axpy, rk4_combine, sum, dot, min};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace queuenet::simd
