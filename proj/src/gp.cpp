#include "feasimap/gp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <json.hpp>

#include "feasimap/errors.hpp"
#include "feasimap/kern/kernels.hpp"
#include "feasimap/rng.hpp"

namespace feasimap {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;
constexpr double kLog2Pi = 1.83787706640934548356;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw InputError(std::string(what) + ": non-finite value");
}

}  // namespace

void Dataset::validate() const {
  if (inputs.rows() == 0) throw InputError("Dataset: empty");
  if (inputs.cols() == 0) throw InputError("Dataset: zero-dimensional inputs");
  if (outputs.size() != inputs.rows()) throw InputError("Dataset: output length != input rows");
  check_finite({inputs.data(), inputs.rows() * inputs.cols()}, "Dataset inputs");
  check_finite(outputs, "Dataset outputs");
}

void KernelParams::validate(std::size_t dimension) const {
  if (!(signal_variance > 0.0)) throw InputError("KernelParams: signal_variance must be > 0");
  if (lengthscales.size() != dimension)
    throw InputError("KernelParams: lengthscale count != dimension");
  for (double l : lengthscales)
    if (!(l > 0.0)) throw InputError("KernelParams: lengthscales must be > 0");
  if (!(noise_variance >= 0.0)) throw InputError("KernelParams: noise_variance must be >= 0");
}

double matern52(std::span<const double> x_a, std::span<const double> x_b,
                const KernelParams& params) {
  if (x_a.size() != x_b.size()) throw InputError("matern52: dimension mismatch");
  params.validate(x_a.size());
  double r2 = 0.0;
  for (std::size_t d = 0; d < x_a.size(); ++d) {
    const double diff = (x_a[d] - x_b[d]) / params.lengthscales[d];
    r2 += diff * diff;
  }
  const double r = std::sqrt(r2);
  return params.signal_variance * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
}

namespace {

// ---------------------------------------------------------------------------
// Kernel matrix assembly and the marginal likelihood with gradients.
// ---------------------------------------------------------------------------

struct KernelMatrices {
  Matrix kf;  // noise-free covariance
  Matrix r2;  // squared lengthscale-weighted distances
};

void build_kernel_matrices(const Matrix& xn, const std::vector<double>& xt,
                           const KernelParams& p, KernelMatrices& out) {
  const std::size_t m = xn.rows();
  const std::size_t n = xn.cols();
  const auto& k = kern::ops();

  std::vector<double> inv_ls2(n);
  for (std::size_t d = 0; d < n; ++d) inv_ls2[d] = 1.0 / (p.lengthscales[d] * p.lengthscales[d]);

  out.kf = Matrix(m, m);
  out.r2 = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    k.ard_sqdist(xt.data(), m, n, xn.row(i).data(), inv_ls2.data(), out.r2.row(i).data());
    k.matern52(out.r2.row(i).data(), m, p.signal_variance, out.kf.row(i).data());
  }
}

// Cholesky of kf + (noise + jitter) I, escalating jitter until it succeeds.
// Returns the jitter used, or a negative value on failure.
double cholesky_with_jitter(const Matrix& kf, double noise, Matrix& l) {
  const std::size_t m = kf.rows();
  double jitter = 0.0;
  while (true) {
    l = kf;
    for (std::size_t i = 0; i < m; ++i) l(i, i) += noise + jitter;
    if (cholesky_lower(l)) return jitter;
    jitter = (jitter == 0.0) ? kJitterStart : jitter * 10.0;
    if (jitter > kJitterMax) return -1.0;
  }
}

struct LmlResult {
  double value = -std::numeric_limits<double>::infinity();
  double jitter = 0.0;
  Matrix chol;
  std::vector<double> alpha;
  bool ok = false;
};

LmlResult lml_with_factor(const Matrix& kf, std::span<const double> y, double noise) {
  LmlResult res;
  res.jitter = cholesky_with_jitter(kf, noise, res.chol);
  if (res.jitter < 0.0) return res;
  const std::size_t m = kf.rows();
  res.alpha.assign(y.begin(), y.end());
  solve_lower(res.chol, res.alpha);
  solve_lower_transpose(res.chol, res.alpha);
  const double fit_term = kern::ops().dot(y.data(), res.alpha.data(), m);
  res.value = -0.5 * fit_term - 0.5 * log_det_from_cholesky(res.chol) -
              0.5 * static_cast<double>(m) * kLog2Pi;
  res.ok = std::isfinite(res.value);
  return res;
}

// theta layout: [log ls_0 .. log ls_{n-1}, log sf2, log sn2]
struct LmlObjective {
  const Matrix& xn;
  const std::vector<double>& xt;
  std::span<const double> y;

  KernelMatrices mats;     // scratch
  std::vector<double> wp;  // scratch row

  KernelParams params_from(std::span<const double> theta) const {
    const std::size_t n = xn.cols();
    KernelParams p;
    p.lengthscales.resize(n);
    for (std::size_t d = 0; d < n; ++d) p.lengthscales[d] = std::exp(theta[d]);
    p.signal_variance = std::exp(theta[n]);
    p.noise_variance = std::exp(theta[n + 1]);
    return p;
  }

  // Returns -lml and fills grad with d(-lml)/dtheta; +inf when the
  // factorization fails so the line search backs off.
  double eval(std::span<const double> theta, std::span<double> grad) {
    const std::size_t m = xn.rows();
    const std::size_t n = xn.cols();
    const KernelParams p = params_from(theta);

    build_kernel_matrices(xn, xt, p, mats);
    LmlResult lml = lml_with_factor(mats.kf, y, p.noise_variance);
    if (!lml.ok) return std::numeric_limits<double>::infinity();

    const auto& k = kern::ops();

    // grad lml wrt theta_i = 0.5 tr(W dK/dtheta_i), W = alpha alpha^T - K^{-1}.
    // L^{-1} is materialized row-transposed so inner loops run contiguously.
    Matrix ut(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      ut(j, j) = 1.0 / lml.chol(j, j);
      for (std::size_t i = j + 1; i < m; ++i) {
        const double s = k.dot(lml.chol.data() + i * m + j, ut.row(j).data() + j, i - j);
        ut(j, i) = -s / lml.chol(i, i);
      }
    }
    Matrix w(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const std::size_t lo = std::max(i, j);
        const double kinv = k.dot(ut.row(i).data() + lo, ut.row(j).data() + lo, m - lo);
        const double wij = lml.alpha[i] * lml.alpha[j] - kinv;
        w(i, j) = wij;
        w(j, i) = wij;
      }
    }

    // dK/dlog ls_d is elementwise P * (dx_d / ls_d)^2 with
    // P = (5/3) sf2 (1 + sqrt5 r) exp(-sqrt5 r).
    std::vector<double> acc(n, 0.0);
    double trace_wkf = 0.0;
    double trace_w = 0.0;
    wp.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double* r2row = mats.r2.row(i).data();
      const double* kfrow = mats.kf.row(i).data();
      const double* wrow = w.row(i).data();
      for (std::size_t j = 0; j < m; ++j) {
        const double r = std::sqrt(r2row[j]);
        const double e = std::exp(-kSqrt5 * r);
        wp[j] = wrow[j] * (5.0 / 3.0) * p.signal_variance * (1.0 + kSqrt5 * r) * e;
      }
      trace_wkf += k.dot(wrow, kfrow, m);
      trace_w += wrow[i];
      for (std::size_t d = 0; d < n; ++d)
        acc[d] += k.weighted_sqdiff_sum(xt.data() + d * m, wp.data(), m, xn(i, d));
    }
    for (std::size_t d = 0; d < n; ++d) {
      const double ls2 = p.lengthscales[d] * p.lengthscales[d];
      grad[d] = -0.5 * acc[d] / ls2;
    }
    grad[n] = -0.5 * trace_wkf;
    grad[n + 1] = -0.5 * p.noise_variance * trace_w;
    return -lml.value;
  }
};

// ---------------------------------------------------------------------------
// Projected L-BFGS (minimization, box constraints handled by clipping).
// ---------------------------------------------------------------------------

void clip_to_box(std::span<double> x, std::span<const double> lo, std::span<const double> hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

struct LbfgsResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
};

template <typename F>
LbfgsResult projected_lbfgs_min(F&& objective, std::vector<double> x,
                                std::span<const double> lo, std::span<const double> hi,
                                int max_iterations, double gradient_tolerance) {
  const std::size_t n = x.size();
  clip_to_box(x, lo, hi);

  std::vector<double> g(n), x_new(n), g_new(n), d(n), step(n);
  double f = objective(x, g);
  if (!std::isfinite(f)) return {std::move(x), f};

  std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;  // (s, y)
  constexpr std::size_t kMemory = 8;

  for (int iter = 0; iter < max_iterations; ++iter) {
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      pg_norm = std::max(pg_norm, std::abs(std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i]));
    if (pg_norm < gradient_tolerance) break;

    // Two-loop recursion for d = -H g.
    d.assign(g.begin(), g.end());
    std::vector<double> rho(memory.size()), alpha_mem(memory.size());
    for (std::size_t mi = 0; mi < memory.size(); ++mi) {
      const auto& [s, yv] = memory[mi];
      double sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) sy += s[i] * yv[i];
      rho[mi] = 1.0 / sy;
    }
    for (std::size_t mi = memory.size(); mi-- > 0;) {
      const auto& [s, yv] = memory[mi];
      double sd = 0.0;
      for (std::size_t i = 0; i < n; ++i) sd += s[i] * d[i];
      alpha_mem[mi] = rho[mi] * sd;
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_mem[mi] * yv[i];
    }
    if (!memory.empty()) {
      const auto& [s, yv] = memory.back();
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += s[i] * yv[i];
        yy += yv[i] * yv[i];
      }
      const double gamma = sy / yy;
      for (std::size_t i = 0; i < n; ++i) d[i] *= gamma;
    }
    for (std::size_t mi = 0; mi < memory.size(); ++mi) {
      const auto& [s, yv] = memory[mi];
      double yd = 0.0;
      for (std::size_t i = 0; i < n; ++i) yd += yv[i] * d[i];
      const double beta = alpha_mem[mi] - rho[mi] * yd;
      for (std::size_t i = 0; i < n; ++i) d[i] += beta * s[i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -d[i];

    double gd = 0.0;
    for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
    if (!(gd < 0.0)) {  // not a descent direction; restart from steepest descent
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    }

    // Backtracking Armijo search along the projected path.
    double t = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
      clip_to_box(x_new, lo, hi);
      double g_dot_step = 0.0;
      double step_norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step[i] = x_new[i] - x[i];
        g_dot_step += g[i] * step[i];
        step_norm = std::max(step_norm, std::abs(step[i]));
      }
      if (step_norm < 1e-15) break;
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * std::min(g_dot_step, 0.0)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> s(n), yv(n);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
      sy += s[i] * yv[i];
      ss += s[i] * s[i];
      yy += yv[i] * yv[i];
    }
    if (sy > 1e-10 * std::sqrt(ss * yy)) {
      memory.emplace_back(std::move(s), std::move(yv));
      if (memory.size() > kMemory) memory.pop_front();
    } else {
      memory.clear();
    }
    x = x_new;
    g = g_new;
    f = f_new;
  }
  return {std::move(x), f};
}

Normalization make_normalization(const Dataset& data, const FitConfig& config) {
  const std::size_t n = data.dimension();
  Normalization norm;
  norm.input_lo.resize(n);
  norm.input_hi.resize(n);
  if (!config.input_bounds.empty()) {
    if (config.input_bounds.size() != n)
      throw InputError("FitConfig: input_bounds dimension mismatch");
    for (std::size_t d = 0; d < n; ++d) {
      norm.input_lo[d] = config.input_bounds[d].first;
      norm.input_hi[d] = config.input_bounds[d].second;
      if (!(norm.input_lo[d] < norm.input_hi[d]))
        throw InputError("FitConfig: input_bounds must have lo < hi");
    }
  } else {
    for (std::size_t d = 0; d < n; ++d) {
      double lo = data.inputs(0, d), hi = lo;
      for (std::size_t i = 1; i < data.size(); ++i) {
        lo = std::min(lo, data.inputs(i, d));
        hi = std::max(hi, data.inputs(i, d));
      }
      if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
      }
      norm.input_lo[d] = lo;
      norm.input_hi[d] = hi;
    }
  }
  double mean = 0.0;
  for (double y : data.outputs) mean += y;
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (double y : data.outputs) var += (y - mean) * (y - mean);
  var /= static_cast<double>(data.size());
  norm.output_mean = mean;
  norm.output_std = (var > 1e-24) ? std::sqrt(var) : 1.0;
  return norm;
}

}  // namespace

// ---------------------------------------------------------------------------
// GpModel
// ---------------------------------------------------------------------------

GpModel GpModel::condition(Dataset raw, Normalization norm, KernelParams params) {
  GpModel model;
  model.raw_ = std::move(raw);
  model.norm_ = std::move(norm);
  model.params_ = std::move(params);

  const std::size_t m = model.raw_.size();
  const std::size_t n = model.raw_.dimension();
  model.xn_ = Matrix(m, n);
  model.xt_.resize(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      const double z = (model.raw_.inputs(i, d) - model.norm_.input_lo[d]) /
                       (model.norm_.input_hi[d] - model.norm_.input_lo[d]);
      model.xn_(i, d) = z;
      model.xt_[d * m + i] = z;
    }
  }
  model.yn_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    model.yn_[i] = (model.raw_.outputs[i] - model.norm_.output_mean) / model.norm_.output_std;

  KernelMatrices mats;
  build_kernel_matrices(model.xn_, model.xt_, model.params_, mats);
  LmlResult lml = lml_with_factor(mats.kf, model.yn_, model.params_.noise_variance);
  if (!lml.ok)
    throw NumericalError("GpModel: covariance not positive definite after jitter escalation");
  model.chol_ = std::move(lml.chol);
  model.alpha_ = std::move(lml.alpha);
  model.lml_ = lml.value;
  model.jitter_ = lml.jitter;
  return model;
}

GpModel GpModel::with_params(const Dataset& data, const KernelParams& params) {
  data.validate();
  params.validate(data.dimension());
  Normalization identity;
  identity.input_lo.assign(data.dimension(), 0.0);
  identity.input_hi.assign(data.dimension(), 1.0);
  return condition(data, identity, params);
}

GpModel GpModel::fit(const Dataset& data, const FitConfig& config) {
  data.validate();
  if (data.size() < 2) throw InputError("GpModel::fit: need at least 2 samples");
  bool distinct = false;
  for (std::size_t i = 1; i < data.size() && !distinct; ++i)
    for (std::size_t d = 0; d < data.dimension(); ++d)
      if (data.inputs(i, d) != data.inputs(0, d)) {
        distinct = true;
        break;
      }
  if (!distinct) throw InputError("GpModel::fit: need at least 2 distinct inputs");

  const Normalization norm = make_normalization(data, config);
  const std::size_t m = data.size();
  const std::size_t n = data.dimension();

  Matrix xn(m, n);
  std::vector<double> xt(m * n), yn(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      const double z =
          (data.inputs(i, d) - norm.input_lo[d]) / (norm.input_hi[d] - norm.input_lo[d]);
      xn(i, d) = z;
      xt[d * m + i] = z;
    }
  }
  for (std::size_t i = 0; i < m; ++i) yn[i] = (data.outputs[i] - norm.output_mean) / norm.output_std;

  const std::size_t dim = n + 2;
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t d = 0; d < n; ++d) {
    lo[d] = std::log(config.lengthscale_lo);
    hi[d] = std::log(config.lengthscale_hi);
  }
  lo[n] = std::log(config.signal_variance_lo);
  hi[n] = std::log(config.signal_variance_hi);
  lo[n + 1] = std::log(config.noise_variance_lo);
  hi[n + 1] = std::log(config.noise_variance_hi);

  LmlObjective objective{xn, xt, yn, {}, {}};
  auto eval = [&objective](std::span<const double> theta, std::span<double> grad) {
    return objective.eval(theta, grad);
  };

  std::vector<double> best_theta;
  double best_f = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < std::max(1, config.restarts); ++restart) {
    std::vector<double> theta0(dim);
    if (restart == 0) {
      for (std::size_t d = 0; d < n; ++d) theta0[d] = std::log(0.5);
      theta0[n] = 0.0;
      theta0[n + 1] = std::log(1e-6);
    } else {
      Rng rng(derive_seed(config.seed, "gp_restart", static_cast<std::uint64_t>(restart)));
      for (std::size_t d = 0; d < n; ++d)
        theta0[d] = rng.uniform(std::log(0.05), std::log(2.0));
      theta0[n] = rng.uniform(std::log(0.2), std::log(5.0));
      theta0[n + 1] = rng.uniform(std::log(1e-8), std::log(1e-3));
    }
    LbfgsResult res = projected_lbfgs_min(eval, std::move(theta0), lo, hi,
                                          config.max_iterations, config.gradient_tolerance);
    if (res.f < best_f) {
      best_f = res.f;
      best_theta = std::move(res.x);
    }
  }
  if (!std::isfinite(best_f))
    throw NumericalError("GpModel::fit: no restart produced a valid likelihood");

  // The likelihood surface is flat in log noise near zero (gradient scales
  // with the noise itself), so ascent can stall above the floor. Snap to the
  // floor when that does not cost likelihood: deterministic responses are
  // interpolated more faithfully there.
  if (best_theta[n + 1] > lo[n + 1]) {
    std::vector<double> floored = best_theta;
    floored[n + 1] = lo[n + 1];
    std::vector<double> scratch_grad(dim);
    const double f_floor = objective.eval(floored, scratch_grad);
    if (f_floor <= best_f) {
      best_f = f_floor;
      best_theta = std::move(floored);
    }
  }

  return condition(data, norm, objective.params_from(best_theta));
}

Prediction GpModel::predict(std::span<const double> x) const {
  PredictScratch scratch;
  return predict(x, scratch);
}

Prediction GpModel::predict(std::span<const double> x, PredictScratch& scratch) const {
  const std::size_t m = raw_.size();
  const std::size_t n = raw_.dimension();
  if (x.size() != n) throw InputError("GpModel::predict: dimension mismatch");
  for (double xi : x)
    if (!std::isfinite(xi)) throw InputError("GpModel::predict: non-finite input");

  scratch.r2.resize(m);
  scratch.k.resize(m);
  scratch.v.resize(m + n);  // v holds the solve; tail holds the normalized query
  double* q = scratch.v.data() + m;
  std::vector<double> inv_ls2(n);
  for (std::size_t d = 0; d < n; ++d) {
    q[d] = (x[d] - norm_.input_lo[d]) / (norm_.input_hi[d] - norm_.input_lo[d]);
    inv_ls2[d] = 1.0 / (params_.lengthscales[d] * params_.lengthscales[d]);
  }

  const auto& kops = kern::ops();
  kops.ard_sqdist(xt_.data(), m, n, q, inv_ls2.data(), scratch.r2.data());
  kops.matern52(scratch.r2.data(), m, params_.signal_variance, scratch.k.data());

  const double mean_n = kops.dot(scratch.k.data(), alpha_.data(), m);
  std::copy(scratch.k.begin(), scratch.k.end(), scratch.v.begin());
  solve_lower(chol_, {scratch.v.data(), m});
  double var_n = params_.signal_variance - kops.dot(scratch.v.data(), scratch.v.data(), m);
  var_n = std::max(var_n, 0.0);

  Prediction out;
  out.std_norm = std::sqrt(var_n);
  out.mean = norm_.output_mean + norm_.output_std * mean_n;
  out.std = norm_.output_std * out.std_norm;
  return out;
}

double gp_log_marginal_likelihood(const Matrix& inputs, std::span<const double> outputs,
                                  const KernelParams& params) {
  if (inputs.rows() != outputs.size())
    throw InputError("gp_log_marginal_likelihood: shape mismatch");
  params.validate(inputs.cols());
  const std::size_t m = inputs.rows();
  const std::size_t n = inputs.cols();
  Matrix xn = inputs;
  std::vector<double> xt(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t d = 0; d < n; ++d) xt[d * m + i] = inputs(i, d);
  KernelMatrices mats;
  build_kernel_matrices(xn, xt, params, mats);
  LmlResult res = lml_with_factor(mats.kf, outputs, params.noise_variance);
  if (!res.ok)
    throw NumericalError("gp_log_marginal_likelihood: covariance not positive definite");
  return res.value;
}

std::vector<double> gp_lml_gradient(const Matrix& inputs, std::span<const double> outputs,
                                    const KernelParams& params) {
  if (inputs.rows() != outputs.size()) throw InputError("gp_lml_gradient: shape mismatch");
  params.validate(inputs.cols());
  const std::size_t m = inputs.rows();
  const std::size_t n = inputs.cols();
  std::vector<double> xt(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t d = 0; d < n; ++d) xt[d * m + i] = inputs(i, d);
  LmlObjective objective{inputs, xt, outputs, {}, {}};
  std::vector<double> theta(n + 2), grad(n + 2);
  for (std::size_t d = 0; d < n; ++d) theta[d] = std::log(params.lengthscales[d]);
  theta[n] = std::log(params.signal_variance);
  theta[n + 1] = std::log(std::max(params.noise_variance, 1e-300));
  if (!std::isfinite(objective.eval(theta, grad)))
    throw NumericalError("gp_lml_gradient: covariance not positive definite");
  for (double& g : grad) g = -g;  // eval() returns the negated objective
  return grad;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string GpModel::to_json() const {
  nlohmann::json j;
  j["kernel"] = "matern52";
  j["lengthscales"] = params_.lengthscales;
  j["signal_variance"] = params_.signal_variance;
  j["noise_variance"] = params_.noise_variance;
  j["normalization"] = {{"input_lo", norm_.input_lo},
                        {"input_hi", norm_.input_hi},
                        {"output_mean", norm_.output_mean},
                        {"output_std", norm_.output_std}};
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t d = 0; d < raw_.dimension(); ++d) row.push_back(raw_.inputs(i, d));
    rows.push_back(std::move(row));
  }
  j["training_inputs"] = std::move(rows);
  j["training_outputs"] = raw_.outputs;
  return j.dump(2);
}

GpModel GpModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("kernel").get<std::string>() != "matern52")
    throw InputError("GpModel::from_json: unsupported kernel");

  KernelParams params;
  params.lengthscales = j.at("lengthscales").get<std::vector<double>>();
  params.signal_variance = j.at("signal_variance").get<double>();
  params.noise_variance = j.at("noise_variance").get<double>();

  Normalization norm;
  const auto& jn = j.at("normalization");
  norm.input_lo = jn.at("input_lo").get<std::vector<double>>();
  norm.input_hi = jn.at("input_hi").get<std::vector<double>>();
  norm.output_mean = jn.at("output_mean").get<double>();
  norm.output_std = jn.at("output_std").get<double>();

  const auto rows = j.at("training_inputs").get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw InputError("GpModel::from_json: empty training set");
  Dataset data;
  data.inputs = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw InputError("GpModel::from_json: ragged training inputs");
    for (std::size_t d = 0; d < rows[i].size(); ++d) data.inputs(i, d) = rows[i][d];
  }
  data.outputs = j.at("training_outputs").get<std::vector<double>>();
  data.validate();
  params.validate(data.dimension());
  return condition(std::move(data), std::move(norm), std::move(params));
}

}  // namespace feasimap
