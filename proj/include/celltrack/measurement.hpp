#pragma once

#include <string>
#include <vector>

#include "celltrack/densities.hpp"

namespace celltrack {

struct Detection {
  Vec position;
  Vec features;
};

struct DetectionFrame {
  int frame = 0;
  std::vector<Detection> detections;
};

/// Mode-dependent appearance likelihood g(alpha | m).
struct AppearanceModel {
  enum class Kind { None, BetaFeatures, IntensityThreshold };
  Kind kind = Kind::None;
  /// Intensity-threshold form: normal mode is a falling logistic, mitotic a rising one.
  double midpoint = 0.5;
  double slope = 10.0;

  double value(const Vec& features, int mode) const;
  static Kind parse_kind(const std::string& name);
  static std::string kind_name(Kind k);
};

struct SensorModel {
  Mat H;
  Mat R;
  AppearanceModel appearance;
  /// Squared Mahalanobis gate; infinity disables gating.
  double gate = 25.0;

  static SensorModel cell(double sigma_eps);
};

struct SingleLikelihood {
  double log_value = kNegInf;
  GaussianMixture kin_post;
  CategoricalMode mode_post;
};

/// Kinematic x appearance likelihood of one detection and the matching posterior.
SingleLikelihood single_likelihood(const Detection& det, const GaussianMixture& kin, const CategoricalMode& mode,
                                   const SensorModel& sm, const ReductionConfig& red = {});

/// log sum_m mode(m) g(alpha|m), and the mode posterior.
double log_appearance_factor(const Detection& det, const CategoricalMode& mode, const AppearanceModel& am,
                             CategoricalMode* post = nullptr);

struct PsiResult {
  double log_value = kNegInf;
  HybridDensity posterior;
};

/// psi for detection index j (0 = missed). `det` must be null exactly when j == 0.
/// `log_kappa` is the log clutter intensity at the detection.
PsiResult psi(int j, const Detection* det, const HybridDensity& hd, const SensorModel& sm, double log_kappa,
              const ReductionConfig& red = {});

struct ClutterModel {
  /// Known mode: fixed mean clutter count per frame.
  bool unknown = false;
  double rate = 30.0;
  /// Unknown mode: clutter generator bank parameters.
  double birth = 0.5;
  double survival = 0.9;
  double detection = 0.9;
};

/// Mean-field clutter generator bank: tracks the expected number of clutter
/// generators. Generators cannot divide and have uniform spatial likelihood.
struct ClutterBank {
  double generators = 0.0;

  /// Expected generator count after birth and survival.
  ClutterBank predict(const ClutterModel& cm) const;
  /// Expected clutter detections at the current step (intensity mass).
  double expected_detections(const ClutterModel& cm) const { return cm.detection * generators; }
  /// Update with per-measurement probabilities of being target-originated.
  ClutterBank update(const ClutterModel& cm, const std::vector<double>& target_prob) const;
  /// Reported clutter cardinality: sum of existence times clutter detection probability.
  double estimated_clutter(const ClutterModel& cm) const { return cm.detection * generators; }
};

ClutterBank clutter_object_step(const ClutterBank& bank, const ClutterModel& cm,
                                const std::vector<double>& target_prob);

}  // namespace celltrack
