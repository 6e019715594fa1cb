#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "feasimap/errors.hpp"
#include "feasimap/gp.hpp"
#include "feasimap/rng.hpp"

using namespace feasimap;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys) {
  Dataset d;
  d.inputs = Matrix(xs.size(), xs.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs[i].size(); ++j) d.inputs(i, j) = xs[i][j];
  d.outputs = ys;
  return d;
}

// Dense-inverse likelihood oracle, independent of the Cholesky path:
// Gauss-Jordan inverse plus determinant by row reduction.
double lml_dense_oracle(const Matrix& x, const std::vector<double>& y, const KernelParams& p) {
  const std::size_t m = x.rows();
  Matrix k(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      k(i, j) = matern52(x.row(i), x.row(j), p);
      if (i == j) k(i, j) += p.noise_variance;
    }

  Matrix aug(m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) aug(i, j) = k(i, j);
    aug(i, m + i) = 1.0;
  }
  double log_det = 0.0;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(aug(r, col)) > std::abs(aug(pivot, col))) pivot = r;
    if (pivot != col) {
      for (std::size_t c = 0; c < 2 * m; ++c) std::swap(aug(col, c), aug(pivot, c));
    }
    log_det += std::log(std::abs(aug(col, col)));
    const double inv_pivot = 1.0 / aug(col, col);
    for (std::size_t c = 0; c < 2 * m; ++c) aug(col, c) *= inv_pivot;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = aug(r, col);
      for (std::size_t c = 0; c < 2 * m; ++c) aug(r, c) -= f * aug(col, c);
    }
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) quad += y[i] * aug(i, m + j) * y[j];
  return -0.5 * quad - 0.5 * log_det - 0.5 * m * std::log(2.0 * 3.14159265358979323846);
}

}  // namespace

TEST_CASE("matern52 closed-form values") {
  KernelParams p;
  p.signal_variance = 2.0;
  p.lengthscales = {1.0};
  const std::vector<double> a{0.3}, b{0.3};
  CHECK(matern52(a, b, p) == doctest::Approx(2.0).epsilon(1e-15));

  p.signal_variance = 1.0;
  const std::vector<double> x0{0.0}, x1{1.0};
  const double expected = (1.0 + std::sqrt(5.0) + 5.0 / 3.0) * std::exp(-std::sqrt(5.0));
  CHECK(matern52(x0, x1, p) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.52399).epsilon(1e-4));

  const std::vector<double> far{1e6};
  CHECK(matern52(x0, far, p) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(matern52(x0, x1, p) == matern52(x1, x0, p));

  const std::vector<double> wrong{0.0, 1.0};
  CHECK_THROWS_AS(matern52(x0, wrong, p), InputError);
}

TEST_CASE("cholesky likelihood matches the dense-inverse oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t m = 5, n = 2;
    Matrix x(m, n);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t d = 0; d < n; ++d) x(i, d) = rng.uniform(0.0, 1.0);
      y[i] = rng.uniform(-1.0, 1.0);
    }
    KernelParams p;
    p.signal_variance = rng.uniform(0.5, 2.0);
    p.lengthscales = {rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)};
    p.noise_variance = rng.uniform(1e-4, 1e-2);
    CHECK(gp_log_marginal_likelihood(x, y, p) ==
          doctest::Approx(lml_dense_oracle(x, y, p)).epsilon(1e-8));
  }
}

TEST_CASE("analytic likelihood gradient matches finite differences") {
  Rng rng(37);
  const std::size_t m = 7, n = 2;
  Matrix x(m, n);
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) x(i, d) = rng.uniform(0.0, 1.0);
    y[i] = std::sin(3.0 * x(i, 0)) + 0.5 * x(i, 1);
  }
  KernelParams p;
  p.signal_variance = 1.3;
  p.lengthscales = {0.45, 0.8};
  p.noise_variance = 1e-3;

  const std::vector<double> grad = gp_lml_gradient(x, y, p);
  const double h = 1e-6;
  auto perturbed = [&](int which, double factor) {
    KernelParams q = p;
    if (which < static_cast<int>(n)) q.lengthscales[which] *= factor;
    else if (which == static_cast<int>(n)) q.signal_variance *= factor;
    else q.noise_variance *= factor;
    return gp_log_marginal_likelihood(x, y, q);
  };
  for (int i = 0; i < static_cast<int>(n) + 2; ++i) {
    const double fd = (perturbed(i, std::exp(h)) - perturbed(i, std::exp(-h))) / (2.0 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("fit interpolates a noiseless linear function") {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) {
    const double a = static_cast<double>(i) / 9.0;
    const double b = static_cast<double>((i * 3) % 10) / 9.0;
    xs.push_back({a, b});
    ys.push_back(2.0 * a - b + 0.5);
  }
  const Dataset data = make_dataset(xs, ys);
  FitConfig config;
  config.restarts = 5;
  config.seed = 99;
  const GpModel model = GpModel::fit(data, config);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Prediction p = model.predict(xs[i]);
    CHECK(std::abs(p.mean - ys[i]) < 1e-6);
  }
}

TEST_CASE("duplicate inputs with conflicting outputs are absorbed by noise") {
  const Dataset data = make_dataset({{0.2}, {0.2}, {0.7}, {0.9}}, {1.0, 2.0, 0.5, 0.0});
  FitConfig config;
  config.restarts = 5;
  config.seed = 7;
  const GpModel model = GpModel::fit(data, config);
  CHECK(model.params().noise_variance > 1e-8);
  const Prediction p = model.predict(std::vector<double>{0.2});
  CHECK(p.mean > 0.5);
  CHECK(p.mean < 2.5);
}

TEST_CASE("fit is deterministic given the seed") {
  Rng rng(43);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 9; ++i) {
    xs.push_back({rng.uniform(0.0, 1.0)});
    ys.push_back(std::sin(6.0 * xs.back()[0]));
  }
  const Dataset data = make_dataset(xs, ys);
  FitConfig config;
  config.restarts = 4;
  config.seed = 1234;
  const GpModel a = GpModel::fit(data, config);
  const GpModel b = GpModel::fit(data, config);
  CHECK(a.params().signal_variance == b.params().signal_variance);
  CHECK(a.params().noise_variance == b.params().noise_variance);
  CHECK(a.params().lengthscales == b.params().lengthscales);
}

TEST_CASE("fit input validation") {
  CHECK_THROWS_AS(GpModel::fit(make_dataset({{0.1}}, {1.0}), FitConfig{}), InputError);
  CHECK_THROWS_AS(GpModel::fit(make_dataset({{0.1}, {0.1}}, {1.0, 1.0}), FitConfig{}),
                  InputError);
}

TEST_CASE("noiseless model interpolates at training points and reverts far away") {
  const Dataset data = make_dataset({{0.1}, {0.4}, {0.55}, {0.8}}, {0.3, -0.2, 0.1, 0.6});
  KernelParams p;
  p.signal_variance = 1.0;
  p.lengthscales = {0.2};
  p.noise_variance = 0.0;
  const GpModel model = GpModel::with_params(data, p);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const Prediction pr = model.predict(data.inputs.row(i));
    CHECK(std::abs(pr.mean - data.outputs[i]) < 1e-4);
    CHECK(pr.std_norm <= 1e-4);
  }
  // >= 10 lengthscales from everything: prior mean ~0, std ~ sqrt(sv).
  const Prediction far = model.predict(std::vector<double>{5.0});
  CHECK(std::abs(far.mean) < 1e-3);
  CHECK(far.std == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(model.predict(std::vector<double>{std::nan("")}), InputError);
  CHECK_THROWS_AS(model.predict(std::vector<double>{0.0, 0.0}), InputError);
}

TEST_CASE("predictive variance shrinks when the query point joins the data") {
  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 6; ++i) {
      xs.push_back({rng.uniform(0.0, 1.0)});
      ys.push_back(rng.uniform(-1.0, 1.0));
    }
    KernelParams p;
    p.signal_variance = 1.0;
    p.lengthscales = {0.3};
    p.noise_variance = 0.0;
    const std::vector<double> query{rng.uniform(0.0, 1.0)};
    const GpModel before = GpModel::with_params(make_dataset(xs, ys), p);
    const double std_before = before.predict(query).std;

    auto xs2 = xs;
    auto ys2 = ys;
    xs2.push_back(query);
    ys2.push_back(before.predict(query).mean);
    const GpModel after = GpModel::with_params(make_dataset(xs2, ys2), p);
    CHECK(after.predict(query).std <= std_before + 1e-9);
  }
}

TEST_CASE("prediction is invariant to training row order") {
  Rng rng(53);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 8; ++i) {
    xs.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
    ys.push_back(rng.uniform(-1.0, 1.0));
  }
  KernelParams p;
  p.signal_variance = 1.2;
  p.lengthscales = {0.4, 0.6};
  p.noise_variance = 1e-6;
  const GpModel a = GpModel::with_params(make_dataset(xs, ys), p);

  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  std::vector<std::vector<double>> xs2;
  std::vector<double> ys2;
  for (std::size_t i : perm) {
    xs2.push_back(xs[i]);
    ys2.push_back(ys[i]);
  }
  const GpModel b = GpModel::with_params(make_dataset(xs2, ys2), p);

  for (int i = 0; i < 20; ++i) {
    const std::vector<double> q{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    CHECK(a.predict(q).mean == doctest::Approx(b.predict(q).mean).epsilon(1e-9));
    CHECK(a.predict(q).std == doctest::Approx(b.predict(q).std).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("fitted sine stays within its own two-sigma band") {
  const double two_pi = 6.28318530717958647692;
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 9; ++i) {
    const double x = two_pi * i / 8.0;
    xs.push_back({x});
    ys.push_back(std::sin(x));
  }
  FitConfig config;
  config.restarts = 6;
  config.seed = 2718;
  config.input_bounds = {{0.0, two_pi}};
  const GpModel model = GpModel::fit(make_dataset(xs, ys), config);
  for (int i = 0; i <= 300; ++i) {
    const double x = two_pi * i / 300.0;
    const Prediction p = model.predict(std::vector<double>{x});
    CHECK(std::abs(p.mean - std::sin(x)) <= 2.0 * p.std + 1e-3);
  }
}

TEST_CASE("serialization round-trips to identical predictions") {
  Rng rng(59);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 7; ++i) {
    xs.push_back({rng.uniform(-2.0, 5.0), rng.uniform(10.0, 30.0)});
    ys.push_back(rng.uniform(-100.0, 100.0));
  }
  FitConfig config;
  config.restarts = 3;
  config.seed = 4321;
  config.input_bounds = {{-2.0, 5.0}, {10.0, 30.0}};
  const GpModel model = GpModel::fit(make_dataset(xs, ys), config);

  const GpModel reloaded = GpModel::from_json(model.to_json());
  for (int i = 0; i < 25; ++i) {
    const std::vector<double> q{rng.uniform(-2.0, 5.0), rng.uniform(10.0, 30.0)};
    const Prediction a = model.predict(q);
    const Prediction b = reloaded.predict(q);
    CHECK(a.mean == b.mean);  // bit-identical: JSON numbers round-trip exactly
    CHECK(a.std == b.std);
  }
  CHECK_THROWS_AS(GpModel::from_json("{\"kernel\":\"rbf\"}"), std::exception);
}
