#include <arm_neon.h>

#include <cstddef>
#include <limits>

#include "queuenet/kernel_table.hpp"

// Two float64x2 registers stand in for one four-lane accumulator so that the
// reduction order matches the scalar and AVX2 variants.

namespace queuenet::simd {
namespace {

void band_flow(double* out, const double* p, const double* coef, double scale,
               std::ptrdiff_t offset, std::size_t lo, std::size_t hi) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t s = lo;
  for (; s + 2 <= hi; s += 2) {
    float64x2_t f = vmulq_f64(vmulq_f64(vs, vld1q_f64(coef + s)), vld1q_f64(p + s));
    vst1q_f64(out + s, vsubq_f64(vld1q_f64(out + s), f));
  }
  for (; s < hi; ++s) out[s] -= (scale * coef[s]) * p[s];

  double* shifted = out + offset;
  s = lo;
  for (; s + 2 <= hi; s += 2) {
    float64x2_t f = vmulq_f64(vmulq_f64(vs, vld1q_f64(coef + s)), vld1q_f64(p + s));
    vst1q_f64(shifted + s, vaddq_f64(vld1q_f64(shifted + s), f));
  }
  for (; s < hi; ++s) shifted[s] += (scale * coef[s]) * p[s];
}

void axpy(double* out, const double* x, double a, const double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(va, vld1q_f64(y + i))));
  }
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(double* out, const double* p, const double* k1, const double* k2,
                 const double* k3, const double* k4, double h, std::size_t n) {
  const double h6 = h / 6.0;
  const float64x2_t vh = vdupq_n_f64(h6);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t outer = vaddq_f64(vld1q_f64(k1 + i), vld1q_f64(k4 + i));
    float64x2_t inner = vaddq_f64(vld1q_f64(k2 + i), vld1q_f64(k3 + i));
    float64x2_t incr = vmulq_f64(vh, vaddq_f64(outer, vmulq_f64(two, inner)));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(p + i), incr));
  }
  for (; i < n; ++i) out[i] = p[i] + h6 * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
}

double sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

inline double pick_min(double a, double b) { return a < b ? a : b; }

double min(const double* x, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double acc[4] = {inf, inf, inf, inf};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // vminq_f64 propagates NaN differently from pick_min; use compare+select.
    float64x2_t a0 = vld1q_f64(acc), a1 = vld1q_f64(acc + 2);
    float64x2_t x0 = vld1q_f64(x + i), x1 = vld1q_f64(x + i + 2);
    vst1q_f64(acc, vbslq_f64(vcltq_f64(a0, x0), a0, x0));
    vst1q_f64(acc + 2, vbslq_f64(vcltq_f64(a1, x1), a1, x1));
  }
  double m = pick_min(pick_min(acc[0], acc[1]), pick_min(acc[2], acc[3]));
  for (; i < n; ++i) m = pick_min(m, x[i]);
  return m;
}

constexpr KernelTable kNeon{"neon", band_flow, axpy, rk4_combine, sum, dot, min};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace queuenet::simd
