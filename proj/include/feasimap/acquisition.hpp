#pragma once

// Acquisition functions for boundary-seeking search: the entropy-loss
// criterion (knudde), four adapted reliability criteria (tmse, bichon,
// ranjan, echard) with a composite rule for multiple constraints, and the
// boundary-probability-times-entropy criterion (pbe).
//
// All criteria see the models' predictions on the constraints' own output
// scale, including the pbe entropy term. Entropy can go negative once every
// predictive std drops below ~0.24; pbe then saturates at zero over the
// confident regions. pbe_entropy_floor clips the entropy factor from below
// for anyone who wants to keep pure boundary targeting in that regime.

#include <optional>
#include <span>
#include <string>

#include "feasimap/feasibility.hpp"

namespace feasimap {

enum class AcquisitionKind { knudde, tmse, bichon, ranjan, echard, pbe };

AcquisitionKind parse_acquisition(const std::string& name);
std::string acquisition_name(AcquisitionKind kind);

struct AcqOptions {
  std::optional<double> pbe_entropy_floor;  // off by default: entropy used as-is
};

// --- single constraint ------------------------------------------------------

/// Entropy loss around the threshold:
/// 0.5 ln(2 pi e sigma^2) - ln(Phi(tau) (1 - Phi(tau))). -inf when sigma <= 0.
double acq_knudde_single(double mu, double sigma, double t);

/// Targeted mean squared error: sigma * pdf(z), z = (mu - t) / sigma.
double acq_tmse_single(double mu, double sigma, double t);

/// Expected feasibility E[max(0, sigma - |t - g|)], g ~ N(mu, sigma^2).
double acq_bichon_single(double mu, double sigma, double t);

/// E[max(0, sigma^2 - (t - g)^2)], g ~ N(mu, sigma^2).
double acq_ranjan_single(double mu, double sigma, double t);

/// Negative standardized misclassification distance: -|mu - t| / sigma.
double acq_echard_single(double mu, double sigma, double t);

// --- multi constraint -------------------------------------------------------

/// Sum of single-constraint entropy losses over all constraints.
double acq_knudde(const JointPrediction& jp, std::span<const double> thresholds);

/// Composite rule for kind in {tmse, bichon, ranjan, echard}: pick the
/// constraint k = argmax_l (mu_l - t_l) (lowest index on ties) and evaluate
/// that constraint's single form.
double acq_composite(AcquisitionKind kind, const JointPrediction& jp,
                     std::span<const double> thresholds);

/// p(feasible) * p(infeasible) in [0, 1/4].
double prob_boundary(const JointPrediction& jp);

/// Differential entropy of the joint (diagonal) predictive Gaussian:
/// (L/2) ln(2 pi e) + sum_l ln sigma_l, on the models' output scale.
double joint_entropy(const JointPrediction& jp);

/// prob_boundary * joint_entropy; exactly 0 wherever the boundary probability
/// vanishes (certain regions), regardless of the entropy there.
double acq_pbe(const JointPrediction& jp, const AcqOptions& options = {});

/// Dispatch on kind. Values may be infinite; use AcquisitionEvaluator when
/// feeding an optimizer.
double evaluate_acquisition(AcquisitionKind kind, const MultiSurrogate& surr,
                            std::span<const double> x, const AcqOptions& options = {});

/// Hot-path functor: owns per-thread prediction scratch and clamps the value
/// into [-1e12, 1e12] so optimizer rankings stay finite.
class AcquisitionEvaluator {
 public:
  AcquisitionEvaluator(const MultiSurrogate& surr, AcquisitionKind kind, AcqOptions options = {})
      : surr_(&surr), kind_(kind), options_(options) {}

  double operator()(std::span<const double> x);

 private:
  const MultiSurrogate* surr_;
  AcquisitionKind kind_;
  AcqOptions options_;
  JointScratch scratch_;
};

// --- oracle pieces ----------------------------------------------------------

/// Three-term truncated-entropy decomposition of the entropy-loss criterion:
/// 3 H[p] - H[p | g > t] - H[p | g < t]. Exposed for the oracle tests; note
/// it agrees with acq_knudde_single only at tau = 0 (the tau pdf terms of the
/// two truncated entropies do not cancel; see tests/acceptance notes).
double knudde_entropy_decomposition(double mu, double sigma, double t);

}  // namespace feasimap
