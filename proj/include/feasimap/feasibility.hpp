#pragma once

// One independent GP per constraint, stacked into a diagonal joint predictive
// distribution, with the probability-of-feasibility classifier on top.

#include <span>
#include <string>
#include <vector>

#include "feasimap/gp.hpp"

namespace feasimap {

struct MultiSurrogate {
  std::vector<GpModel> models;
  std::vector<double> thresholds;

  std::size_t num_constraints() const { return models.size(); }
  std::size_t dimension() const { return models.empty() ? 0 : models.front().dimension(); }
  void validate() const;

  std::string to_json() const;
  static MultiSurrogate from_json(const std::string& text);
};

struct JointPrediction {
  std::vector<double> means;      // raw units
  std::vector<double> stds;       // raw units
  std::vector<double> stds_norm;  // standardized output units
  std::vector<double> taus;       // (t_l - mu_l) / sigma_l
};

/// Scratch for the hot path: one per evaluating thread.
struct JointScratch {
  PredictScratch gp;
  JointPrediction jp;
};

/// tau = (t - mu) / sigma with the degenerate-sigma rule: sigma below 1e-12
/// maps to +inf when mu <= t and -inf otherwise.
double feasibility_tau(double mu, double sigma, double threshold);

JointPrediction joint_predict(const MultiSurrogate& surr, std::span<const double> x);
const JointPrediction& joint_predict(const MultiSurrogate& surr, std::span<const double> x,
                                     JointScratch& scratch);

/// Sum_l ln Phi(tau_l); -inf when any constraint is certainly violated.
double log_prob_feasible(const JointPrediction& jp);

/// prod_l Phi(tau_l), computed in the log domain.
double prob_feasible(const JointPrediction& jp);

/// Feasible iff p(feasible) > 1/2; the tie goes to infeasible.
bool classify(const MultiSurrogate& surr, std::span<const double> x);

}  // namespace feasimap
