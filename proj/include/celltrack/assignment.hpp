#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "celltrack/densities.hpp"
#include "celltrack/labels.hpp"

namespace celltrack {

/// One row of an extended association map: (j1, j2, j3).
/// Non-division rows are (-1, -1, j3) with j3 in {-1..M}; division rows are
/// (j1, j2, -1) with j1, j2 in {0..M}.
using Triplet = std::array<int, 3>;

inline constexpr Triplet kDeath{-1, -1, -1};

inline bool is_division(const Triplet& t) { return t[0] >= 0; }
inline bool is_survival(const Triplet& t) { return t[0] < 0 && t[2] >= 0; }
inline bool is_death(const Triplet& t) { return t == kDeath; }

/// Number of candidates per row: (M+1)^2 + M + 2.
int candidate_count(int M);
/// Fixed enumeration order: the (-1,-1,j3) block for j3 = -1..M, then divisions
/// row-major over (j1, j2).
Triplet candidate_at(int M, int k);
int candidate_index(int M, const Triplet& t);

struct ExtendedAssociationMap {
  std::vector<Triplet> rows;

  friend bool operator==(const ExtendedAssociationMap&, const ExtendedAssociationMap&) = default;
  friend auto operator<=>(const ExtendedAssociationMap&, const ExtendedAssociationMap&) = default;
  std::uint64_t hash() const;
};

/// Sparse log-domain cost row: only candidates with non-zero lambda are listed,
/// in increasing candidate index.
struct CostRow {
  Label label;
  bool birth = false;
  std::vector<int> candidates;
  std::vector<double> log_lambda;

  double log_cost(int candidate) const;
};

struct CostTable {
  int M = 0;
  double log_weight = 0.0;  // prior hypothesis weight
  std::vector<CostRow> rows;
};

/// Structural membership in Gamma: positive 1-1, division constraint, births in N+ only.
bool is_valid_gamma(const ExtendedAssociationMap& g, int M, const std::vector<bool>& birth_rows);
bool is_valid_gamma(const CostTable& ct, const ExtendedAssociationMap& g);

/// log of omega * 1_Gamma(gamma) * prod_i lambda_i(gamma_i).
double gamma_log_weight(const CostTable& ct, const ExtendedAssociationMap& g);
double gamma_weight(const CostTable& ct, const ExtendedAssociationMap& g);

struct HypothesisKeys {
  std::set<Label> labels;
  std::map<Label, int> assoc;
};

/// Decode gamma into (I+, theta+). `row_labels[i]` is the prior or birth label of row i.
HypothesisKeys gamma_to_hypothesis_keys(const ExtendedAssociationMap& g, const std::vector<Label>& row_labels,
                                        const std::vector<bool>& birth_rows, int next_time);
/// Inverse of gamma_to_hypothesis_keys.
ExtendedAssociationMap hypothesis_keys_to_gamma(const HypothesisKeys& keys, const std::vector<Label>& row_labels,
                                                const std::vector<bool>& birth_rows, int next_time);

/// Prior rows (-1,-1,0), birth rows (-1,-1,-1). Always in Gamma.
ExtendedAssociationMap default_gamma(const CostTable& ct);

/// Block Gibbs sampler. Returns the distinct visited maps in visit order; the
/// first one is `init`. `T` counts iterations including the initial state.
std::vector<ExtendedAssociationMap> gibbs_sample(const CostTable& ct, const ExtendedAssociationMap& init,
                                                 std::size_t T, std::uint64_t seed);

/// Full visit sequence (with repeats), used to check the empirical law.
std::vector<ExtendedAssociationMap> gibbs_chain(const CostTable& ct, const ExtendedAssociationMap& init,
                                                std::size_t T, std::uint64_t seed);

/// All maps with non-zero weight, by depth-first search over the sparse rows.
/// Throws CapacityError when more than `limit` maps exist.
std::vector<ExtendedAssociationMap> enumerate_gamma(const CostTable& ct, std::size_t limit = 1000000);

/// Every structurally valid map for P rows and M measurements (no costs).
/// Guarded to P <= 4, M <= 3.
std::vector<ExtendedAssociationMap> enumerate_gamma(int P, int M, const std::vector<bool>& birth_rows);

/// One-sweep transition probability of the block Gibbs kernel.
double gibbs_transition_probability(const CostTable& ct, const ExtendedAssociationMap& from,
                                    const ExtendedAssociationMap& to);

}  // namespace celltrack
