#include "feasimap/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feasimap/errors.hpp"
#include "feasimap/normal.hpp"

namespace feasimap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2PiE = 2.83787706640934548356;
constexpr double kSentinel = 1e12;
}  // namespace

AcquisitionKind parse_acquisition(const std::string& name) {
  if (name == "knudde") return AcquisitionKind::knudde;
  if (name == "tmse") return AcquisitionKind::tmse;
  if (name == "bichon") return AcquisitionKind::bichon;
  if (name == "ranjan") return AcquisitionKind::ranjan;
  if (name == "echard") return AcquisitionKind::echard;
  if (name == "pbe") return AcquisitionKind::pbe;
  throw InputError("unknown acquisition: " + name);
}

std::string acquisition_name(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::knudde: return "knudde";
    case AcquisitionKind::tmse: return "tmse";
    case AcquisitionKind::bichon: return "bichon";
    case AcquisitionKind::ranjan: return "ranjan";
    case AcquisitionKind::echard: return "echard";
    case AcquisitionKind::pbe: return "pbe";
  }
  throw InputError("unknown acquisition kind");
}

double acq_knudde_single(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return -kInf;
  const double tau = (t - mu) / sigma;
  // ln(Phi (1 - Phi)) in the log domain; 1 - Phi(tau) = Phi(-tau).
  return 0.5 * (kLog2PiE + std::log(sigma * sigma)) - (log_norm_cdf(tau) + log_norm_cdf(-tau));
}

double acq_tmse_single(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return 0.0;
  const double z = (mu - t) / sigma;
  return sigma * norm_pdf(z);
}

double acq_bichon_single(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return 0.0;
  const double z = (mu - t) / sigma;
  const double zp = z + 1.0;
  const double zm = z - 1.0;
  return sigma * (zp * norm_cdf(zp) + zm * norm_cdf(zm) + norm_pdf(zp) + norm_pdf(zm) -
                  2.0 * z * norm_cdf(z) - 2.0 * norm_pdf(z));
}

double acq_ranjan_single(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return 0.0;
  const double z = (mu - t) / sigma;
  const double zp = z + 1.0;
  const double zm = z - 1.0;
  return sigma * sigma *
         (z * z * (norm_cdf(zm) - norm_cdf(zp)) + zp * norm_pdf(zm) - zm * norm_pdf(zp));
}

double acq_echard_single(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return mu == t ? 0.0 : -kInf;
  return -std::abs(mu - t) / sigma;
}

double acq_knudde(const JointPrediction& jp, std::span<const double> thresholds) {
  double s = 0.0;
  for (std::size_t l = 0; l < thresholds.size(); ++l)
    s += acq_knudde_single(jp.means[l], jp.stds[l], thresholds[l]);
  return s;
}

double acq_composite(AcquisitionKind kind, const JointPrediction& jp,
                     std::span<const double> thresholds) {
  std::size_t k = 0;
  double best = jp.means[0] - thresholds[0];
  for (std::size_t l = 1; l < thresholds.size(); ++l) {
    const double v = jp.means[l] - thresholds[l];
    if (v > best) {  // strict: ties keep the lowest index
      best = v;
      k = l;
    }
  }
  switch (kind) {
    case AcquisitionKind::tmse: return acq_tmse_single(jp.means[k], jp.stds[k], thresholds[k]);
    case AcquisitionKind::bichon: return acq_bichon_single(jp.means[k], jp.stds[k], thresholds[k]);
    case AcquisitionKind::ranjan: return acq_ranjan_single(jp.means[k], jp.stds[k], thresholds[k]);
    case AcquisitionKind::echard: return acq_echard_single(jp.means[k], jp.stds[k], thresholds[k]);
    default: throw InputError("acq_composite: kind must be one of tmse|bichon|ranjan|echard");
  }
}

double prob_boundary(const JointPrediction& jp) {
  const double s = log_prob_feasible(jp);
  if (s == -kInf) return 0.0;
  // p (1 - p) = exp(s) * (-expm1(s)), exact complement by construction.
  return std::exp(s) * (-std::expm1(s));
}

double joint_entropy(const JointPrediction& jp) {
  double s = 0.5 * static_cast<double>(jp.stds.size()) * kLog2PiE;
  for (double sd : jp.stds) s += std::log(sd);
  return s;
}

double acq_pbe(const JointPrediction& jp, const AcqOptions& options) {
  const double pb = prob_boundary(jp);
  if (pb == 0.0) return 0.0;
  double h = joint_entropy(jp);
  if (options.pbe_entropy_floor) h = std::max(h, *options.pbe_entropy_floor);
  return pb * h;
}

double evaluate_acquisition(AcquisitionKind kind, const MultiSurrogate& surr,
                            std::span<const double> x, const AcqOptions& options) {
  const JointPrediction jp = joint_predict(surr, x);
  switch (kind) {
    case AcquisitionKind::knudde: return acq_knudde(jp, surr.thresholds);
    case AcquisitionKind::pbe: return acq_pbe(jp, options);
    default: return acq_composite(kind, jp, surr.thresholds);
  }
}

double AcquisitionEvaluator::operator()(std::span<const double> x) {
  const JointPrediction& jp = joint_predict(*surr_, x, scratch_);
  double v;
  switch (kind_) {
    case AcquisitionKind::knudde: v = acq_knudde(jp, surr_->thresholds); break;
    case AcquisitionKind::pbe: v = acq_pbe(jp, options_); break;
    default: v = acq_composite(kind_, jp, surr_->thresholds); break;
  }
  if (std::isnan(v)) return -kSentinel;
  return std::clamp(v, -kSentinel, kSentinel);
}

double knudde_entropy_decomposition(double mu, double sigma, double t) {
  if (!(sigma > 0.0)) return -kInf;
  const double h_full = 0.5 * (kLog2PiE + std::log(sigma * sigma));
  const double h_below = truncated_normal_entropy(mu, sigma, -kInf, t);
  const double h_above = truncated_normal_entropy(mu, sigma, t, kInf);
  return 3.0 * h_full - h_above - h_below;
}

}  // namespace feasimap
