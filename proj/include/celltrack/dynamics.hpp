#pragma once

#include <array>
#include <set>
#include <vector>

#include "celltrack/densities.hpp"
#include "celltrack/labels.hpp"

namespace celltrack {

/// Survival kinematics: a mixture of affine Gaussian transitions.
struct MotionModel {
  std::vector<AffineGaussianModel> components;

  /// Constant-velocity / free-diffusion mixture on [px, py, vx, vy].
  /// Note the diffusion covariance is sigma_s * F2 (not squared).
  static MotionModel cell(double w_cv, double w_fd, double sigma_v, double sigma_s);
};

/// Daughter kinematics: each daughter gets F x + (+/-) d_n + noise, with the same
/// parent state feeding both, so siblings are correlated.
struct MitosisModel {
  Mat F;
  Mat Q;
  int components = 1;
  double theta_hat_deg = 0.0;
  double epsilon_deg = 90.0;
  double distance = 10.0;
  /// Replace theta_hat by the bearing of the parent's mean velocity when it is non-zero.
  bool bearing_from_velocity = true;
  /// Number of leading position entries; velocities follow.
  int position_dims = 2;

  static MitosisModel cell(double sigma_s, int components, double theta_hat_deg, double epsilon_deg,
                           double distance, bool bearing_from_velocity);
  Vec offset(double theta_deg) const;
  double parent_bearing_deg(const Vec& parent_mean) const;
};

/// Stacked affine maps [F; F] x + [d_n; -d_n] with block-diagonal noise, one per component.
std::vector<AffineGaussianModel> mitosis_models(const MitosisModel& mit, const GaussianMixture& parent);

/// Mode-conditioned generation table and daughter mode laws. Index 0 = normal, 1 = mitotic.
struct ModeModel {
  /// rho[m][c]: probability that an object in mode m generates c objects.
  std::array<std::array<double, 3>, 2> rho{{{0.01, 0.98, 0.01}, {0.01, 0.09, 0.9}}};
  /// survive[j][m+] and daughter[j][m+].
  std::array<std::array<double, 2>, 2> survive{{{0.97, 0.03}, {0.97, 0.03}}};
  std::array<std::array<double, 2>, 2> daughter{{{0.97, 0.03}, {0.97, 0.03}}};

  static ModeModel memoryless(double p_sp, std::array<std::array<double, 3>, 2> rho);
  void validate() const;
};

std::array<double, 3> generation_cardinality(const CategoricalMode& mode, const ModeModel& mm);

/// Mode of the surviving object, conditioned on survival.
CategoricalMode survival_mode(const CategoricalMode& mode, const ModeModel& mm);
/// Marginal mode of each daughter, conditioned on division.
CategoricalMode daughter_mode(const CategoricalMode& mode, const ModeModel& mm);

HybridDensity survival_predict(const HybridDensity& d, const MotionModel& motion, const ModeModel& mm,
                               double beta_inflation, const ReductionConfig& red = {});

struct SpawnPrediction {
  JointGaussianMixture joint;
  CategoricalMode daughter_mode;
  BetaDensity daughter_detection;
};

SpawnPrediction spawn_predict_joint(const HybridDensity& d, const Label& parent, int next_time,
                                    const MitosisModel& mit, const ModeModel& mm,
                                    const ReductionConfig& red = {});

struct BirthEntry {
  Label label;
  double r = 0.0;
  HybridDensity density;
};

struct BirthModel {
  std::vector<BirthEntry> entries;
};

/// log of the LMB birth weight; -inf when `born` contains a label outside the model.
double lmb_birth_log_weight(const BirthModel& bm, const std::set<Label>& born);
double lmb_birth_weight(const BirthModel& bm, const std::set<Label>& born);

struct ImageBounds {
  double x_min = 0.0, y_min = 0.0, x_max = 1000.0, y_max = 1000.0;
  int dims = 2;

  double area() const { return dims == 1 ? (x_max - x_min) : (x_max - x_min) * (y_max - y_min); }
  bool contains(const Vec& pos) const;
  double distance_to_edge(const Vec& pos) const;
};

struct AdaptiveBirthConfig {
  double r_base = 0.02;
  double r_max = 0.9;
  double edge_boost = 3.0;
  double edge_width = 50.0;
  double position_sigma = 5.0;
  double velocity_sigma = 3.0;
  /// Measurements whose association probability reaches this value spawn no birth.
  double association_threshold = 0.5;
  CategoricalMode mode{0.97, 0.03};
  BetaDensity detection{4.0, 1.0, -1.0};
};

/// Multiplier rising linearly from 1 (at edge_width inward) to edge_boost at the border.
double edge_boost(const Vec& pos, const ImageBounds& bounds, const AdaptiveBirthConfig& cfg);

struct DetectionFrame;

/// Births for time `time` from the measurements of the previous frame whose
/// association probability is below the threshold. Label index = measurement index.
BirthModel adaptive_birth(const DetectionFrame& prev, const std::vector<double>& association_prob,
                          int time, const ImageBounds& bounds, const AdaptiveBirthConfig& cfg,
                          int state_dim, int position_dims);

}  // namespace celltrack
