#include <doctest.h>

#include <cmath>
#include <vector>

#include "feasimap/kern/kernels.hpp"
#include "feasimap/rng.hpp"

using namespace feasimap;

namespace {

// Lanes reassociate sums and contract into FMA, so equality is to a tight
// relative tolerance, not bitwise.
void check_close(double a, double b, double rel = 1e-12) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  CHECK(std::abs(a - b) <= rel * scale + 1e-300);
}

}  // namespace

TEST_CASE("kernel lanes agree on every op across awkward sizes") {
  if (!kern::avx2_supported()) return;  // scalar-only host: nothing to compare
  const auto& scalar = kern::scalar_ops();
  const auto& simd = kern::avx2_ops();

  Rng rng(42);
  for (std::size_t m : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 16u, 31u, 64u, 67u}) {
    for (std::size_t n : {1u, 2u, 5u, 15u}) {
      std::vector<double> xt(m * n), q(n), inv_ls2(n), r2a(m), r2b(m), ka(m), kb(m);
      for (auto& v : xt) v = rng.uniform(-3.0, 3.0);
      for (auto& v : q) v = rng.uniform(-3.0, 3.0);
      for (auto& v : inv_ls2) v = rng.uniform(0.1, 50.0);

      scalar.ard_sqdist(xt.data(), m, n, q.data(), inv_ls2.data(), r2a.data());
      simd.ard_sqdist(xt.data(), m, n, q.data(), inv_ls2.data(), r2b.data());
      for (std::size_t j = 0; j < m; ++j) check_close(r2a[j], r2b[j]);

      scalar.matern52(r2a.data(), m, 2.5, ka.data());
      simd.matern52(r2a.data(), m, 2.5, kb.data());
      for (std::size_t j = 0; j < m; ++j) check_close(ka[j], kb[j], 4e-14);

      std::vector<double> a(m), b(m), ya(m), yb(m);
      for (auto& v : a) v = rng.uniform(-2.0, 2.0);
      for (auto& v : b) v = rng.uniform(-2.0, 2.0);
      check_close(scalar.dot(a.data(), b.data(), m), simd.dot(a.data(), b.data(), m));

      ya = a;
      yb = a;
      scalar.axpy(m, 1.7, b.data(), ya.data());
      simd.axpy(m, 1.7, b.data(), yb.data());
      for (std::size_t j = 0; j < m; ++j) check_close(ya[j], yb[j]);

      check_close(scalar.weighted_sqdiff_sum(a.data(), b.data(), m, 0.3),
                  simd.weighted_sqdiff_sum(a.data(), b.data(), m, 0.3));
    }
  }
}

TEST_CASE("avx2 matern52 matches the libm closed form deep into the tail") {
  if (!kern::avx2_supported()) return;
  const auto& simd = kern::avx2_ops();
  const double sqrt5 = std::sqrt(5.0);

  std::vector<double> r2;
  for (double r = 0.0; r < 26.0; r += 0.173) r2.push_back(r * r);
  std::vector<double> k(r2.size());
  simd.matern52(r2.data(), r2.size(), 1.0, k.data());
  for (std::size_t j = 0; j < r2.size(); ++j) {
    const double r = std::sqrt(r2[j]);
    const double ref = (1.0 + sqrt5 * r + 5.0 / 3.0 * r2[j]) * std::exp(-sqrt5 * r);
    check_close(k[j], ref, 1e-13);
  }
}

TEST_CASE("dispatch always yields a usable table") {
  const auto& active = kern::ops();
  CHECK(active.dot != nullptr);
  CHECK(active.name != nullptr);
  std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
  CHECK(active.dot(a.data(), b.data(), 3) == doctest::Approx(32.0));
}
