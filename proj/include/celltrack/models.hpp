#pragma once

#include <vector>

#include "celltrack/dynamics.hpp"
#include "celltrack/measurement.hpp"

namespace celltrack {

/// A fixed birth region; its label is Birth(time, index) at every step.
struct StaticBirth {
  int index = 0;
  double r = 0.0;
  HybridDensity density;
};

struct BirthSpec {
  bool adaptive = true;
  AdaptiveBirthConfig adaptive_cfg;
  std::vector<StaticBirth> statics;
};

/// Everything the filters need to know about the world.
struct SystemModel {
  int state_dim = 4;
  int position_dims = 2;
  MotionModel motion;
  MitosisModel mitosis;
  ModeModel modes;
  SensorModel sensor;
  ClutterModel clutter;
  BirthSpec birth;
  ImageBounds bounds;
  /// Known detection probability, used unless `unknown_detection` is set.
  double detection_probability = 0.9;
  bool unknown_detection = false;
  double beta_inflation = 1.1;
  ReductionConfig reduction;

  /// Simulated-detection experiment settings: CV motion, N = 1 mitosis with the
  /// parent bearing and 90 degree rotation, p_sp = 0.03, sigma_eps = 2, 1000x1000 image.
  static SystemModel cell_default();

  /// Detection law attached to newborn objects.
  BetaDensity birth_detection() const;
  BirthModel births_at(int time, const DetectionFrame* prev, const std::vector<double>& prev_assoc) const;
  void validate() const;
};

}  // namespace celltrack
