#pragma once
// Function table shared by every kernel variant. Included by the AVX2
// translation unit, so it must not pull in headers with inline code.

#include <cstddef>

namespace queuenet::simd {

struct KernelTable {
  const char* name;

  // Probability flow along one transition family:
  //   f[s] = (scale * coef[s]) * p[s]   for s in [lo, hi)
  //   out[s] -= f[s];  out[s + offset] += f[s]
  void (*band_flow)(double* out, const double* p, const double* coef, double scale,
                    std::ptrdiff_t offset, std::size_t lo, std::size_t hi);

  // out[i] = x[i] + a * y[i]
  void (*axpy)(double* out, const double* x, double a, const double* y, std::size_t n);

  // out[i] = p[i] + (h / 6) * ((k1[i] + k4[i]) + 2 * (k2[i] + k3[i]))
  void (*rk4_combine)(double* out, const double* p, const double* k1, const double* k2,
                      const double* k3, const double* k4, double h, std::size_t n);

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*min)(const double* x, std::size_t n);
};

}  // namespace queuenet::simd
