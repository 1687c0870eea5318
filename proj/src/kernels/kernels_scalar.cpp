#include "queuenet/kernels.hpp"

#include <limits>

namespace queuenet::simd {
namespace {

void band_flow(double* out, const double* p, const double* coef, double scale,
               std::ptrdiff_t offset, std::size_t lo, std::size_t hi) {
  for (std::size_t s = lo; s < hi; ++s) {
    out[s] -= (scale * coef[s]) * p[s];
  }
  double* shifted = out + offset;
  for (std::size_t s = lo; s < hi; ++s) {
    shifted[s] += (scale * coef[s]) * p[s];
  }
}

void axpy(double* out, const double* x, double a, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(double* out, const double* p, const double* k1, const double* k2,
                 const double* k3, const double* k4, double h, std::size_t n) {
  const double h6 = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = p[i] + h6 * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
  }
}

// Reductions keep four interleaved partial results so that the vector
// variants reproduce them bit for bit.
double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += x[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += x[i + l] * y[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

inline double pick_min(double a, double b) { return a < b ? a : b; }

double min(const double* x, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double acc[4] = {inf, inf, inf, inf};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] = pick_min(acc[l], x[i + l]);
  }
  double m = pick_min(pick_min(acc[0], acc[1]), pick_min(acc[2], acc[3]));
  for (; i < n; ++i) m = pick_min(m, x[i]);
  return m;
}

constexpr KernelTable kScalar{"scalar", band_flow, axpy, rk4_combine, sum, dot, min};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace queuenet::simd
