#pragma once

// Vectorized inner loops for the surrogate hot path.
//
// Every routine exists as a plain scalar reference and, on x86-64 with AVX2 +
// FMA, as an intrinsics variant. The active table is picked once at startup
// from cpuid (override with FEASIMAP_SIMD=scalar|avx2). Lanes are equivalence
// tested against each other; they may differ in the last few ulps because of
// FMA contraction and reassociated accumulation.

#include <cstddef>

namespace feasimap::kern {

struct Ops {
  // out[j] = sum_d inv_ls2[d] * (q[d] - xt[d*m + j])^2
  // xt is dimension-major: n contiguous blocks of m coordinates.
  void (*ard_sqdist)(const double* xt, std::size_t m, std::size_t n,
                     const double* q, const double* inv_ls2, double* out);

  // k[j] = sf2 * (1 + sqrt(5) r + (5/3) r^2) * exp(-sqrt(5) r), r = sqrt(r2[j])
  void (*matern52)(const double* r2, std::size_t m, double sf2, double* k);

  double (*dot)(const double* a, const double* b, std::size_t m);

  // y[j] += a * x[j]
  void (*axpy)(std::size_t m, double a, const double* x, double* y);

  // sum_j w[j] * (q - x[j])^2
  double (*weighted_sqdiff_sum)(const double* x, const double* w, std::size_t m, double q);

  const char* name;
};

const Ops& scalar_ops();
const Ops& avx2_ops();       // valid only if avx2_supported()
bool avx2_supported();

/// Table selected for this process (cpuid + FEASIMAP_SIMD override).
const Ops& ops();

}  // namespace feasimap::kern
