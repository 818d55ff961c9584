#include "celltrack/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "celltrack/errors.hpp"

namespace celltrack {

double AppearanceModel::value(const Vec& features, int mode) const {
  switch (kind) {
    case Kind::None:
      return 1.0;
    case Kind::BetaFeatures:
      if (features.size() < 2) throw InvalidArgument("beta-features appearance needs two features");
      return features(mode == 0 ? 0 : 1);
    case Kind::IntensityThreshold: {
      if (features.size() < 1) throw InvalidArgument("intensity-threshold appearance needs one feature");
      const double up = 1.0 / (1.0 + std::exp(-slope * (features(0) - midpoint)));
      return mode == 0 ? 1.0 - up : up;
    }
  }
  return 1.0;
}

AppearanceModel::Kind AppearanceModel::parse_kind(const std::string& name) {
  if (name == "none") return Kind::None;
  if (name == "beta-features") return Kind::BetaFeatures;
  if (name == "intensity-threshold") return Kind::IntensityThreshold;
  throw ParseError("unknown appearance model '" + name + "'");
}

std::string AppearanceModel::kind_name(Kind k) {
  switch (k) {
    case Kind::None:
      return "none";
    case Kind::BetaFeatures:
      return "beta-features";
    case Kind::IntensityThreshold:
      return "intensity-threshold";
  }
  return "none";
}

SensorModel SensorModel::cell(double sigma_eps) {
  SensorModel sm;
  sm.H = Mat::Zero(2, 4);
  sm.H.block(0, 0, 2, 2) = Mat::Identity(2, 2);
  sm.R = sigma_eps * sigma_eps * Mat::Identity(2, 2);
  sm.appearance.kind = AppearanceModel::Kind::BetaFeatures;
  return sm;
}

double log_appearance_factor(const Detection& det, const CategoricalMode& mode, const AppearanceModel& am,
                             CategoricalMode* post) {
  if (am.kind == AppearanceModel::Kind::None) {
    if (post) *post = mode;
    return 0.0;
  }
  const double a = mode[0] * am.value(det.features, 0);
  const double b = mode[1] * am.value(det.features, 1);
  if (!(a + b > 0.0)) {
    if (post) *post = mode;
    return kNegInf;
  }
  if (post) *post = CategoricalMode::from_unnormalized(a, b);
  return std::log(a + b);
}

SingleLikelihood single_likelihood(const Detection& det, const GaussianMixture& kin, const CategoricalMode& mode,
                                   const SensorModel& sm, const ReductionConfig& red) {
  SingleLikelihood out;
  auto up = gm_update(kin, sm.H, sm.R, det.position, red);
  const double la = log_appearance_factor(det, mode, sm.appearance, &out.mode_post);
  out.log_value = up.log_likelihood + la;
  out.kin_post = std::move(up.posterior);
  return out;
}

PsiResult psi(int j, const Detection* det, const HybridDensity& hd, const SensorModel& sm, double log_kappa,
              const ReductionConfig& red) {
  if ((j == 0) != (det == nullptr)) throw InvalidArgument("psi: detection must be absent exactly when j == 0");
  PsiResult out;
  if (j == 0) {
    const auto bu = beta_update_missed(hd.detection);
    out.log_value = bu.factor > 0.0 ? std::log(bu.factor) : kNegInf;
    out.posterior = {hd.kinematics, hd.mode, bu.posterior};
    return out;
  }
  if (!std::isfinite(log_kappa)) throw NumericalError("clutter intensity must be positive and finite");
  const auto bu = beta_update_detected(hd.detection);
  auto sl = single_likelihood(*det, hd.kinematics, hd.mode, sm, red);
  out.log_value = (bu.factor > 0.0 ? std::log(bu.factor) : kNegInf) + sl.log_value - log_kappa;
  out.posterior = {std::move(sl.kin_post), sl.mode_post, bu.posterior};
  return out;
}

ClutterBank ClutterBank::predict(const ClutterModel& cm) const { return {cm.birth + cm.survival * generators}; }

ClutterBank ClutterBank::update(const ClutterModel& cm, const std::vector<double>& target_prob) const {
  double n = generators * (1.0 - cm.detection);
  for (double p : target_prob) n += std::clamp(1.0 - p, 0.0, 1.0);
  return {n};
}

ClutterBank clutter_object_step(const ClutterBank& bank, const ClutterModel& cm,
                                const std::vector<double>& target_prob) {
  return bank.predict(cm).update(cm, target_prob);
}

}  // namespace celltrack
