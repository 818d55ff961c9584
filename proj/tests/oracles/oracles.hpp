#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They share data types with the library but none of its density algebra.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "celltrack/assignment.hpp"
#include "celltrack/filters.hpp"
#include "celltrack/hypotheses.hpp"
#include "celltrack/models.hpp"

namespace oracle {

using namespace celltrack;

/// Weight of gamma evaluated term by term from the densities (death, survival,
/// division and birth factors with the LMB birth weight), without cost rows.
/// Rows are the hypothesis labels in order, then the birth entries.
double direct_log_weight(const Hypothesis& h, const BirthModel& births, const DetectionFrame& frame,
                         const SystemModel& m, double log_kappa, const ExtendedAssociationMap& g, int time);

/// Cost table from dense per-row lambdas listed in candidate order; zeros are dropped.
CostTable dense_cost_table(int M, const std::vector<std::vector<double>>& lambda, const std::vector<bool>& birth);

/// Every map for P rows and M measurements, by scanning all integer triplets in
/// [-1, M]^3 per row and filtering on the membership rules.
std::vector<ExtendedAssociationMap> brute_force_gammas(int P, int M, const std::vector<bool>& birth);

/// One-dimensional two-frame toy with at most one division.
struct Toy {
  SystemModel model;
  MultiObjectDensity prior;
  std::vector<DetectionFrame> frames;
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double mode_normal = 0.4;
  double detection = 0.8;
  double clutter_rate = 2.0;
  double half_width = 12.0;
};

Toy make_toy();

/// Key shared by the grid oracle and filter hypotheses: "empty" when no label
/// survives, else every (frame, label, measurement) assignment of the history.
std::string history_key(const Hypothesis& h);

/// Posterior hypothesis probabilities after both toy frames by direct summation
/// over a `points`-point grid on [-half_width, half_width].
std::map<std::string, double> grid_posterior(const Toy& toy, int points = 50);

/// Normalized weights of a density grouped by history_key.
std::map<std::string, double> keyed_weights(const MultiObjectDensity& d);

/// Random density at `frame` over a 1-D state. Labels mix old births, births at
/// `frame` and daughters created at `frame`; with `joint` set, sibling pairs
/// share a correlated two-label block.
MultiObjectDensity random_density(std::uint64_t seed, int hypotheses, int frame, bool joint);

/// Pr(n) by grouping hypotheses on their label count.
std::vector<double> recount_cardinality(const MultiObjectDensity& d);

/// Pr(n spawnings) and Pr(n divisions) recounted from the canonical label strings.
std::pair<std::vector<double>, std::vector<double>> recount_spawning(const MultiObjectDensity& d);

/// Sum over labels of the 1-D intensity integrated by the trapezoid rule on [lo, hi].
double integrated_intensity(const MultiObjectDensity& d, double lo, double hi, double step);

double total_variation(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

}  // namespace oracle
