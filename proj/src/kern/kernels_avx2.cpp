#include "feasimap/kern/kernels.hpp"

#include <cmath>

#ifndef FEASIMAP_NO_AVX2_BUILD

#include <immintrin.h>

namespace feasimap::kern {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;
constexpr double kFiveThirds = 5.0 / 3.0;

// exp(x) on 4 lanes. Range reduction x = n*ln2 + r, |r| <= ln2/2, then a
// degree-13 polynomial and exponent reassembly. The 2^n scale is applied in
// two halves so n down to -1075 (denormal results) stays exact. Max error
// observed vs std::exp is ~1 ulp, which the lane equivalence tests pin down.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  x = _mm256_max_pd(x, _mm256_set1_pd(-746.0));
  x = _mm256_min_pd(x, _mm256_set1_pd(708.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // exp(r) = 1 + r + r^2 * P(r), Taylor coefficients 1/k!
  const __m256d c2 = _mm256_set1_pd(1.0 / 2);
  const __m256d c3 = _mm256_set1_pd(1.0 / 6);
  const __m256d c4 = _mm256_set1_pd(1.0 / 24);
  const __m256d c5 = _mm256_set1_pd(1.0 / 120);
  const __m256d c6 = _mm256_set1_pd(1.0 / 720);
  const __m256d c7 = _mm256_set1_pd(1.0 / 5040);
  const __m256d c8 = _mm256_set1_pd(1.0 / 40320);
  const __m256d c9 = _mm256_set1_pd(1.0 / 362880);
  const __m256d c10 = _mm256_set1_pd(1.0 / 3628800);
  const __m256d c11 = _mm256_set1_pd(1.0 / 39916800);
  const __m256d c12 = _mm256_set1_pd(1.0 / 479001600);
  const __m256d c13 = _mm256_set1_pd(1.0 / 6227020800.0);

  __m256d p = c13;
  p = _mm256_fmadd_pd(p, r, c12);
  p = _mm256_fmadd_pd(p, r, c11);
  p = _mm256_fmadd_pd(p, r, c10);
  p = _mm256_fmadd_pd(p, r, c9);
  p = _mm256_fmadd_pd(p, r, c8);
  p = _mm256_fmadd_pd(p, r, c7);
  p = _mm256_fmadd_pd(p, r, c6);
  p = _mm256_fmadd_pd(p, r, c5);
  p = _mm256_fmadd_pd(p, r, c4);
  p = _mm256_fmadd_pd(p, r, c3);
  p = _mm256_fmadd_pd(p, r, c2);
  const __m256d r2 = _mm256_mul_pd(r, r);
  __m256d e = _mm256_fmadd_pd(r2, p, r);
  e = _mm256_add_pd(e, _mm256_set1_pd(1.0));

  // 2^n in two steps: n1 = n >> 1 (floor), n2 = n - n1.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  const __m256i one_bits = _mm256_castpd_si256(_mm256_set1_pd(1.0));
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_add_epi64(one_bits, _mm256_slli_epi64(_mm256_cvtepi32_epi64(n1), 52)));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_add_epi64(one_bits, _mm256_slli_epi64(_mm256_cvtepi32_epi64(n2), 52)));
  return _mm256_mul_pd(_mm256_mul_pd(e, s1), s2);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void ard_sqdist_avx2(const double* xt, std::size_t m, std::size_t n,
                     const double* q, const double* inv_ls2, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) _mm256_storeu_pd(out + j, _mm256_setzero_pd());
  for (; j < m; ++j) out[j] = 0.0;

  for (std::size_t d = 0; d < n; ++d) {
    const double* col = xt + d * m;
    const __m256d qd = _mm256_set1_pd(q[d]);
    const __m256d w = _mm256_set1_pd(inv_ls2[d]);
    j = 0;
    for (; j + 4 <= m; j += 4) {
      const __m256d diff = _mm256_sub_pd(qd, _mm256_loadu_pd(col + j));
      const __m256d acc = _mm256_loadu_pd(out + j);
      _mm256_storeu_pd(out + j, _mm256_fmadd_pd(_mm256_mul_pd(w, diff), diff, acc));
    }
    const double qs = q[d];
    const double ws = inv_ls2[d];
    for (; j < m; ++j) {
      const double diff = qs - col[j];
      out[j] += ws * diff * diff;
    }
  }
}

void matern52_avx2(const double* r2, std::size_t m, double sf2, double* k) {
  const __m256d sqrt5 = _mm256_set1_pd(kSqrt5);
  const __m256d five_thirds = _mm256_set1_pd(kFiveThirds);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vsf2 = _mm256_set1_pd(sf2);
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d r2v = _mm256_loadu_pd(r2 + j);
    const __m256d r = _mm256_sqrt_pd(r2v);
    const __m256d sr = _mm256_mul_pd(sqrt5, r);
    const __m256d poly = _mm256_add_pd(one, _mm256_fmadd_pd(five_thirds, r2v, sr));
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), sr));
    _mm256_storeu_pd(k + j, _mm256_mul_pd(vsf2, _mm256_mul_pd(poly, e)));
  }
  for (; j < m; ++j) {
    const double r = std::sqrt(r2[j]);
    const double sr = kSqrt5 * r;
    k[j] = sf2 * (1.0 + sr + kFiveThirds * r2[j]) * std::exp(-sr);
  }
}

double dot_avx2(const double* a, const double* b, std::size_t m) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= m; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
  }
  for (; j + 4 <= m; j += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < m; ++j) s += a[j] * b[j];
  return s;
}

void axpy_avx2(std::size_t m, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d acc = _mm256_loadu_pd(y + j);
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), acc));
  }
  for (; j < m; ++j) y[j] += a * x[j];
}

double weighted_sqdiff_sum_avx2(const double* x, const double* w, std::size_t m, double q) {
  const __m256d vq = _mm256_set1_pd(q);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d diff = _mm256_sub_pd(vq, _mm256_loadu_pd(x + j));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j), diff), diff, acc);
  }
  double s = hsum(acc);
  for (; j < m; ++j) {
    const double diff = q - x[j];
    s += w[j] * diff * diff;
  }
  return s;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table{ard_sqdist_avx2, matern52_avx2, dot_avx2,
                         axpy_avx2, weighted_sqdiff_sum_avx2, "avx2"};
  return table;
}

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace feasimap::kern

#else  // FEASIMAP_NO_AVX2_BUILD

namespace feasimap::kern {

const Ops& avx2_ops() { return scalar_ops(); }
bool avx2_supported() { return false; }

}  // namespace feasimap::kern

#endif
