#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "celltrack/assignment.hpp"
#include "celltrack/hypotheses.hpp"
#include "celltrack/models.hpp"

namespace celltrack {

/// Inputs shared by every cost row of one frame step.
struct StepContext {
  const SystemModel* model = nullptr;
  const DetectionFrame* frame = nullptr;
  int time = 0;
  double log_kappa = 0.0;  // uniform clutter intensity
  bool need_joint = false;  // compute joint-daughter weights/posteriors
};

/// Costs and posteriors of one row (one prior label, or one birth) over its
/// non-zero candidates. `log_pa` are the proposal costs built from marginal
/// daughter densities; `log_joint` replaces them with the joint daughter update
/// (equal except when both daughters are detected).
struct RowPlan {
  Label label;
  bool birth = false;
  std::vector<int> candidates;
  std::vector<double> log_pa;
  std::vector<double> log_joint;
  std::vector<std::array<BlockPtr, 2>> post_pa;
  std::vector<std::array<BlockPtr, 2>> post_joint;
  /// Cost of a row whose prior label has no usable candidates is never empty:
  /// death is always listed when its probability is positive.
};

using RowPlanPtr = std::shared_ptr<const RowPlan>;

/// Plan for a prior label with marginal density `hd`. `key` identifies the
/// source block and seeds the ids of the posterior blocks.
RowPlanPtr plan_prior_row(const Label& label, const HybridDensity& hd, std::uint64_t key, const StepContext& ctx);
RowPlanPtr plan_birth_row(const BirthEntry& entry, const StepContext& ctx);

CostRow to_cost_row(const RowPlan& plan, bool joint);

/// Joint kinematic update of a stacked mixture against the detections of
/// selected slots. Returns the log kinematic likelihood and the posterior.
struct JointKinUpdate {
  double log_likelihood = 0.0;
  GaussianMixture posterior;
};
JointKinUpdate joint_kinematic_update(const GaussianMixture& joint, int dim_per_label,
                                      const std::vector<std::pair<int, const Detection*>>& detected,
                                      const SensorModel& sm, const ReductionConfig& red);

/// Cost table of one hypothesis: one row per label (sorted), then one per birth.
CostTable build_cost_table(const Hypothesis& h, const BirthModel& births, const StepContext& ctx, bool joint = false);

/// Log of the detection, appearance and clutter factors of psi (everything but kinematics).
double log_nonkinematic(int j, const Detection* z, const CategoricalMode& mode, const BetaDensity& det,
                        const SensorModel& sm, double log_kappa);

/// Clutter intensity for the frame step (uniform over the image).
double uniform_log_kappa(double expected_clutter, const ImageBounds& bounds);

}  // namespace celltrack
