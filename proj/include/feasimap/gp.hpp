#pragma once

// Gaussian-process regression for a single constraint response: Matern 5/2
// kernel with ARD lengthscales, hyperparameters fitted by multi-start
// projected L-BFGS on the log marginal likelihood.
//
// Inputs are normalized to the unit hypercube and outputs standardized before
// fitting; predictions are handed back in raw units (plus the normalized
// predictive std, which some acquisition functions want).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feasimap/linalg.hpp"

namespace feasimap {

struct Dataset {
  Matrix inputs;                // M x n, raw coordinates
  std::vector<double> outputs;  // M responses of one constraint

  std::size_t size() const { return inputs.rows(); }
  std::size_t dimension() const { return inputs.cols(); }

  /// Throws InputError unless M >= 1, shapes agree and everything is finite.
  void validate() const;
};

struct KernelParams {
  double signal_variance = 1.0;
  std::vector<double> lengthscales;  // one per input dimension
  double noise_variance = 0.0;

  void validate(std::size_t dimension) const;
};

/// Matern 5/2 covariance between two points.
double matern52(std::span<const double> x_a, std::span<const double> x_b,
                const KernelParams& params);

struct Normalization {
  std::vector<double> input_lo, input_hi;
  double output_mean = 0.0;
  double output_std = 1.0;
};

struct FitConfig {
  int restarts = 10;
  int max_iterations = 120;
  double gradient_tolerance = 1e-5;
  std::uint64_t seed = 0;

  // Input bounds used for unit-cube normalization; data min/max when empty.
  std::vector<std::pair<double, double>> input_bounds;

  // Hyperparameter search box, in normalized space.
  double lengthscale_lo = 1e-3, lengthscale_hi = 10.0;
  double signal_variance_lo = 1e-3, signal_variance_hi = 10.0;
  double noise_variance_lo = 1e-8, noise_variance_hi = 1e-1;
};

struct Prediction {
  double mean = 0.0;      // raw output units
  double std = 0.0;       // raw output units, >= 0
  double std_norm = 0.0;  // standardized output units
};

/// Reusable scratch for predict(); one per thread.
struct PredictScratch {
  std::vector<double> r2, k, v;
};

class GpModel {
 public:
  /// Fit hyperparameters by multi-start gradient ascent of the log marginal
  /// likelihood. Deterministic given config.seed. Requires M >= 2 with at
  /// least two distinct rows.
  static GpModel fit(const Dataset& data, const FitConfig& config);

  /// Condition on data with the given raw-space hyperparameters (identity
  /// normalization). Used by tests and anywhere hyperparameters are known.
  static GpModel with_params(const Dataset& data, const KernelParams& params);

  Prediction predict(std::span<const double> x) const;
  Prediction predict(std::span<const double> x, PredictScratch& scratch) const;

  std::size_t dimension() const { return raw_.dimension(); }
  std::size_t training_size() const { return raw_.size(); }
  const Dataset& training_data() const { return raw_; }
  const KernelParams& params() const { return params_; }       // normalized space
  const Normalization& normalization() const { return norm_; }
  const Matrix& cholesky_factor() const { return chol_; }
  std::span<const double> alpha() const { return alpha_; }
  double log_marginal_likelihood() const { return lml_; }
  double jitter() const { return jitter_; }

  std::string to_json() const;
  static GpModel from_json(const std::string& text);

 private:
  GpModel() = default;
  static GpModel condition(Dataset raw, Normalization norm, KernelParams params);

  Dataset raw_;
  Normalization norm_;
  KernelParams params_;
  Matrix xn_;                // normalized inputs, M x n
  std::vector<double> xt_;   // normalized inputs, dimension-major
  std::vector<double> yn_;   // standardized outputs
  Matrix chol_;              // lower factor of K + jitter I
  std::vector<double> alpha_;
  double lml_ = 0.0;
  double jitter_ = 0.0;
};

/// Log marginal likelihood of `outputs` under a Matern 5/2 GP with the given
/// hyperparameters, no normalization applied. Escalates diagonal jitter
/// (1e-10 to 1e-4) before giving up with NumericalError.
double gp_log_marginal_likelihood(const Matrix& inputs, std::span<const double> outputs,
                                  const KernelParams& params);

/// Gradient of the above wrt (log lengthscales..., log signal variance,
/// log noise variance); the fit climbs this.
std::vector<double> gp_lml_gradient(const Matrix& inputs, std::span<const double> outputs,
                                    const KernelParams& params);

}  // namespace feasimap
