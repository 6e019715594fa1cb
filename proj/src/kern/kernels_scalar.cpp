#include "feasimap/kern/kernels.hpp"

#include <cmath>

// Scalar reference lane. Keep these loops obvious; the AVX2 lane is checked
// against them.

namespace feasimap::kern {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;
constexpr double kFiveThirds = 5.0 / 3.0;

void ard_sqdist_scalar(const double* xt, std::size_t m, std::size_t n,
                       const double* q, const double* inv_ls2, double* out) {
  for (std::size_t j = 0; j < m; ++j) out[j] = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    const double* col = xt + d * m;
    const double qd = q[d];
    const double w = inv_ls2[d];
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = qd - col[j];
      out[j] += w * diff * diff;
    }
  }
}

void matern52_scalar(const double* r2, std::size_t m, double sf2, double* k) {
  for (std::size_t j = 0; j < m; ++j) {
    const double r = std::sqrt(r2[j]);
    const double sr = kSqrt5 * r;
    k[j] = sf2 * (1.0 + sr + kFiveThirds * r2[j]) * std::exp(-sr);
  }
}

double dot_scalar(const double* a, const double* b, std::size_t m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += a[j] * b[j];
  return s;
}

void axpy_scalar(std::size_t m, double a, const double* x, double* y) {
  for (std::size_t j = 0; j < m; ++j) y[j] += a * x[j];
}

double weighted_sqdiff_sum_scalar(const double* x, const double* w, std::size_t m, double q) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double diff = q - x[j];
    s += w[j] * diff * diff;
  }
  return s;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{ard_sqdist_scalar, matern52_scalar, dot_scalar,
                         axpy_scalar, weighted_sqdiff_sum_scalar, "scalar"};
  return table;
}

}  // namespace feasimap::kern
