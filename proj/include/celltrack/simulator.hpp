#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "celltrack/measurement.hpp"
#include "celltrack/tracks.hpp"

namespace celltrack {

/// Ground-truth and detection generation settings. Frames run 0..frames-1.
struct ScenarioConfig {
  int initial_cells = 20;
  int frames = 100;
  double width = 1000.0;
  double height = 1000.0;
  double birth_rate = 0.1;
  double death_prob = 0.01;
  double mitosis_prob = 0.05;
  /// Directed (constant-velocity) versus free-diffusion motion probabilities.
  double w_directed = 0.3;
  double w_diffusion = 0.7;
  double sigma_diffusion = 10.0;
  double sigma_accel = 0.2;
  double initial_speed = 1.0;
  /// New and initial cells are placed at least this far from the border.
  double margin = 50.0;
  double daughter_distance = 10.0;
  double daughter_noise = 1.0;
  /// Divisions are suppressed while this many cells are alive (0: no cap).
  int max_cells = 0;

  double detection_probability = 0.9;
  double clutter_rate = 30.0;
  double sigma_eps = 2.0;
  AppearanceModel::Kind appearance = AppearanceModel::Kind::BetaFeatures;

  std::uint64_t seed = 1;

  void validate() const;
  /// Trajectory parameters of the synthetic migration sequence.
  static ScenarioConfig migration();
};

struct GroundTruth {
  TrackSet tracks;
  /// 0 = normal, 1 = mitotic, per label and frame.
  std::map<Label, std::map<int, int>> modes;
  int frames = 0;
};

GroundTruth generate_truth(const ScenarioConfig& cfg);

std::vector<DetectionFrame> generate_detections(const GroundTruth& truth, const ScenarioConfig& cfg);

/// Truth with a fixed division schedule: `initial` cells, no births or deaths,
/// and `divisions` events spread over the sequence.
struct ScheduledScenario {
  int initial = 4;
  int divisions = 8;
  int frames = 100;
  int first_division = 12;
  int spacing = 10;
};

GroundTruth scheduled_truth(const ScheduledScenario& sc, const ScenarioConfig& cfg);

/// 4 cells growing to 12 through 8 divisions over 100 frames, P_D 0.9, 30 clutter.
std::pair<GroundTruth, std::vector<DetectionFrame>> fixed_scenario_12cells(std::uint64_t seed);
/// 2 cells growing to 6 through 4 divisions.
std::pair<GroundTruth, std::vector<DetectionFrame>> fixed_scenario_6cells(std::uint64_t seed);

}  // namespace celltrack
