#include "feasimap/feasibility.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "feasimap/errors.hpp"
#include "feasimap/normal.hpp"

namespace feasimap {

namespace {
constexpr double kSigmaFloor = 1e-12;
}

void MultiSurrogate::validate() const {
  if (models.empty()) throw InputError("MultiSurrogate: no models");
  if (thresholds.size() != models.size())
    throw InputError("MultiSurrogate: threshold count != model count");
  for (const auto& model : models)
    if (model.dimension() != models.front().dimension())
      throw InputError("MultiSurrogate: mixed input dimensions");
  for (double t : thresholds)
    if (!std::isfinite(t)) throw InputError("MultiSurrogate: non-finite threshold");
}

double feasibility_tau(double mu, double sigma, double threshold) {
  if (sigma < kSigmaFloor)
    return mu <= threshold ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
  return (threshold - mu) / sigma;
}

const JointPrediction& joint_predict(const MultiSurrogate& surr, std::span<const double> x,
                                     JointScratch& scratch) {
  const std::size_t l = surr.num_constraints();
  auto& jp = scratch.jp;
  jp.means.resize(l);
  jp.stds.resize(l);
  jp.stds_norm.resize(l);
  jp.taus.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    const Prediction p = surr.models[i].predict(x, scratch.gp);
    jp.means[i] = p.mean;
    jp.stds[i] = p.std;
    jp.stds_norm[i] = p.std_norm;
    jp.taus[i] = feasibility_tau(p.mean, p.std, surr.thresholds[i]);
  }
  return jp;
}

JointPrediction joint_predict(const MultiSurrogate& surr, std::span<const double> x) {
  JointScratch scratch;
  joint_predict(surr, x, scratch);
  return scratch.jp;
}

double log_prob_feasible(const JointPrediction& jp) {
  double s = 0.0;
  for (double tau : jp.taus) s += log_norm_cdf(tau);
  return s;
}

double prob_feasible(const JointPrediction& jp) { return std::exp(log_prob_feasible(jp)); }

bool classify(const MultiSurrogate& surr, std::span<const double> x) {
  return log_prob_feasible(joint_predict(surr, x)) > std::log(0.5);
}

std::string MultiSurrogate::to_json() const {
  validate();
  nlohmann::json j;
  j["thresholds"] = thresholds;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& model : models) list.push_back(nlohmann::json::parse(model.to_json()));
  j["models"] = std::move(list);
  return j.dump(2);
}

MultiSurrogate MultiSurrogate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MultiSurrogate surr;
  surr.thresholds = j.at("thresholds").get<std::vector<double>>();
  for (const auto& jm : j.at("models")) surr.models.push_back(GpModel::from_json(jm.dump()));
  surr.validate();
  return surr;
}

}  // namespace feasimap
