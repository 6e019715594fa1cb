#include "feasimap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "feasimap/errors.hpp"
#include "feasimap/kern/kernels.hpp"

namespace feasimap {

bool cholesky_lower(Matrix& a) {
  const std::size_t n = a.rows();
  const auto& k = kern::ops();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row_i = a.data() + i * n;
    for (std::size_t j = 0; j <= i; ++j) {
      const double* row_j = a.data() + j * n;
      double s = a(i, j) - k.dot(row_i, row_j, j);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        a(i, i) = std::sqrt(s);
      } else {
        a(i, j) = s / a(j, j);
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
  }
  return true;
}

void solve_lower(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  const auto& k = kern::ops();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row_i = l.data() + i * n;
    x[i] = (x[i] - k.dot(row_i, x.data(), i)) / l(i, i);
  }
}

void solve_lower_transpose(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  const auto& k = kern::ops();
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= l(i, i);
    // Fold x[i]'s contribution into the remaining unknowns via row i of L.
    k.axpy(i, -x[i], l.data() + i * n, x.data());
  }
}

double log_det_from_cholesky(const Matrix& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

void symmetric_eigen(const Matrix& a, Matrix& vectors, std::vector<double>& values) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw InputError("symmetric_eigen: matrix not square");

  Matrix m = a;
  vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) vectors(i, i) = 1.0;

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = m(i, p), miq = m(i, q);
          m(i, p) = c * mip - s * miq;
          m(i, q) = s * mip + c * miq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double mpi = m(p, i), mqi = m(q, i);
          m(p, i) = c * mpi - s * mqi;
          m(q, i) = s * mpi + c * mqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = vectors(i, p), viq = vectors(i, q);
          vectors(i, p) = c * vip - s * viq;
          vectors(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = m(i, i);

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> sorted_values(n);
  Matrix sorted_vectors(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted_values[k] = values[order[k]];
    for (std::size_t i = 0; i < n; ++i) sorted_vectors(i, k) = vectors(i, order[k]);
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

}  // namespace feasimap
