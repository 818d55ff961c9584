#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "celltrack/hypotheses.hpp"
#include "celltrack/models.hpp"
#include "celltrack/tracks.hpp"

namespace celltrack {

/// PA: marginal daughter densities in costs and posteriors.
/// UA: PA proposal, weights and posteriors from the joint daughter update, then marginalized.
/// EF: PA proposal, exact reweighting, joint blocks retained.
enum class Variant { PA, UA, EF };
enum class Execution { Serial, Parallel };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct FilterConfig {
  Variant variant = Variant::PA;
  std::size_t gibbs_samples = 1000;
  std::size_t max_hypotheses = 1000;
  double weight_floor = 1e-5;
  /// Enumerate every association map instead of sampling (small problems only).
  bool enumerate = false;
  std::size_t enumerate_limit = 200000;
  std::uint64_t seed = 1;
  /// Largest joint kinematic dimension an EF block may reach.
  int max_joint_dims = 32;
  Execution execution = Execution::Parallel;

  void validate() const;
};

/// Everything carried from one frame to the next.
struct FilterState {
  MultiObjectDensity density;
  ClutterBank bank;
  std::optional<DetectionFrame> prev_frame;
  /// Per-measurement probability of being object-originated, for prev_frame.
  std::vector<double> prev_assoc;

  /// Empty density just before `first_frame`; the clutter bank starts at its steady state.
  static FilterState initial(const SystemModel& model, int first_frame);
};

struct StepDiagnostics {
  bool keep_pre_truncation = false;
  std::optional<MultiObjectDensity> pre_truncation;
  std::vector<double> target_prob;
  std::size_t children = 0;
  double clutter_intensity_mass = 0.0;
};

/// One joint prediction + update from `state.density.frame` to `frame.frame`.
/// The only truncation happens after the update.
FilterState filter_step(const FilterState& state, const DetectionFrame& frame, const SystemModel& model,
                        const FilterConfig& cfg, StepDiagnostics* diag = nullptr);

/// Density-only forms; births come from static regions only.
MultiObjectDensity pa_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg);
MultiObjectDensity ua_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg);
MultiObjectDensity ef_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg);

struct FrameSummary {
  int frame = 0;
  Estimate estimate;
  std::vector<double> cardinality;
  double cardinality_mean = 0.0;
  double cardinality_std = 0.0;
  SpawnStatistics spawn;
  double clutter_estimate = 0.0;
  /// Existence-weighted mean detection probability; NaN with no objects.
  double mean_detection = 0.0;
  std::size_t hypotheses = 0;
  double seconds = 0.0;
};

struct RunResult {
  std::vector<FrameSummary> frames;
  TrackSet tracks;
};

RunResult run_sequence(const std::vector<DetectionFrame>& frames, const SystemModel& model, const FilterConfig& cfg);

}  // namespace celltrack
