#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "celltrack/densities.hpp"
#include "celltrack/labels.hpp"

namespace celltrack {

/// Density of a group of labels whose kinematics are jointly distributed.
/// Modes and detection probabilities stay per label. A GLMB hypothesis only
/// holds single-label blocks.
struct ObjectBlock {
  JointGaussianMixture kinematics;
  std::vector<CategoricalMode> modes;
  std::vector<BetaDensity> detections;
  std::uint64_t id = 0;

  std::size_t size() const { return kinematics.labels.size(); }
  const std::vector<Label>& labels() const { return kinematics.labels; }
  HybridDensity marginal(std::size_t i) const;
};

using BlockPtr = std::shared_ptr<const ObjectBlock>;

BlockPtr make_single_block(const Label& l, HybridDensity d, std::uint64_t id);

/// One step of an association history: which measurement each label took.
struct AssociationStep {
  int frame = 0;
  std::vector<std::pair<Label, int>> assignments;
  std::shared_ptr<const AssociationStep> prev;
};

struct Hypothesis {
  double log_weight = 0.0;
  std::vector<BlockPtr> blocks;
  std::vector<Label> labels;  // sorted
  std::uint64_t history_id = 0;
  std::shared_ptr<const AssociationStep> history;

  bool contains(const Label& l) const;
  /// (block index, position in block), or (-1, -1).
  std::pair<int, int> locate(const Label& l) const;
  HybridDensity marginal(const Label& l) const;
  bool is_glmb() const;
  /// Rebuild `labels` from the blocks.
  void refresh_labels();
};

struct MultiObjectDensity {
  std::vector<Hypothesis> hypotheses;
  int frame = 0;

  /// The density with a single empty hypothesis.
  static MultiObjectDensity empty(int frame = 0);
  bool is_glmb() const;
};

/// Log-sum-exp normalization. Throws DegenerateDensityError when no weight is finite.
void normalize(MultiObjectDensity& d);

/// Keep at most `cap` hypotheses, drop those below `floor` (after normalization), renormalize.
void truncate(MultiObjectDensity& d, std::size_t cap, double floor);

std::vector<double> cardinality_distribution(const MultiObjectDensity& d);
double label_existence(const MultiObjectDensity& d, const Label& l);
std::map<Label, double> existence_map(const MultiObjectDensity& d);

/// PHD of label `l` at kinematic point x.
double intensity(const MultiObjectDensity& d, const Label& l, const Vec& x);
/// Existence-weighted mixture for label `l` (total weight = existence probability).
GaussianMixture intensity_mixture(const MultiObjectDensity& d, const Label& l);

struct SpawnStatistics {
  std::vector<double> spawnings;
  std::vector<double> divisions;
};

/// Pr(n new spawnings) and Pr(n divisions) at the density's frame. Spawned labels
/// created at this frame form I n (L - L_ - B).
SpawnStatistics spawning_and_division_counts(const MultiObjectDensity& d);

struct ObjectEstimate {
  Label label;
  Vec mean;
  int mode = 0;
  double detection_mean = 0.0;
};

struct Estimate {
  std::vector<ObjectEstimate> objects;
  LineageForest lineage;
  int cardinality = 0;
};

Estimate extract_estimate(const MultiObjectDensity& d);

}  // namespace celltrack
