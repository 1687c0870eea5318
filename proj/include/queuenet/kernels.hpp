#pragma once
// Data-parallel inner loops of the transient solver.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at runtime. All variants perform the same floating-point
// operations in the same order, so results are bit-identical across them;
// reductions use four interleaved partial sums in every variant.

#include <cstddef>
#include <span>
#include <vector>

#include "queuenet/kernel_table.hpp"

namespace queuenet::simd {

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

// Widest available variant unless QUEUENET_SIMD=scalar is set in the
// environment. Resolved on first call.
const KernelTable& active_kernels();

inline double sum(std::span<const double> x) { return active_kernels().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active_kernels().dot(x.data(), y.data(), x.size());
}

inline double min(std::span<const double> x) { return active_kernels().min(x.data(), x.size()); }

}  // namespace queuenet::simd
